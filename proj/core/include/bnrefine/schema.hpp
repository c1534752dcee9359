#ifndef BNREFINE_SCHEMA_HPP
#define BNREFINE_SCHEMA_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bnrefine {

/// A discrete variable and its ordered value labels. The arity is the
/// number of labels and must be at least two.
struct VariableSpec {
  std::string name;
  std::vector<std::string> values;

  std::size_t arity() const noexcept { return values.size(); }
  bool operator==(const VariableSpec&) const = default;
};

/// Ordered list of variables. Position in the list is the total ordering
/// used for parent selection: a variable may only have parents that come
/// before it.
class DomainSchema {
 public:
  DomainSchema() = default;
  explicit DomainSchema(std::vector<VariableSpec> variables);

  /// Convenience for tests and synthetic problems: `count` binary variables
  /// named v0, v1, ... with labels "0" and "1".
  static DomainSchema binary(std::size_t count);

  std::size_t size() const noexcept { return variables_.size(); }
  const VariableSpec& variable(std::size_t i) const { return variables_.at(i); }
  const std::vector<VariableSpec>& variables() const noexcept { return variables_; }
  std::size_t arity(std::size_t i) const { return variables_.at(i).arity(); }
  std::vector<std::size_t> arities() const;

  std::optional<std::size_t> index_of(std::string_view name) const;
  std::optional<std::size_t> value_index(std::size_t var, std::string_view label) const;

  bool operator==(const DomainSchema&) const = default;

 private:
  std::vector<VariableSpec> variables_;
};

/// Global Dirichlet concentration; each family gets
/// alpha / (arity(x) * #parent configurations).
struct PriorConfig {
  double alpha = 1.0;

  void validate() const;
  bool operator==(const PriorConfig&) const = default;
};

/// Expert belief that y is a parent of x, for y before x. Entries of 1 are
/// mandatory arcs, entries of 0 forbidden arcs; pairs without an entry use
/// the default.
class ArcPriorMatrix {
 public:
  using Key = std::pair<std::size_t, std::size_t>;  // (parent, child)

  ArcPriorMatrix() = default;
  explicit ArcPriorMatrix(std::size_t num_variables, double default_prior = 0.5);

  std::size_t num_variables() const noexcept { return n_; }
  double default_prior() const noexcept { return default_prior_; }

  /// Throws ConfigError when y is not before x, p is outside [0,1], or the
  /// pair already carries a different hard (0/1) value.
  void set(std::size_t y, std::size_t x, double p);

  double prior(std::size_t y, std::size_t x) const;
  bool has_entry(std::size_t y, std::size_t x) const;
  bool mandatory(std::size_t y, std::size_t x) const { return prior(y, x) == 1.0; }
  bool forbidden(std::size_t y, std::size_t x) const { return prior(y, x) == 0.0; }

  const std::map<Key, double>& entries() const noexcept { return entries_; }

  bool operator==(const ArcPriorMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  double default_prior_ = 0.5;
  std::map<Key, double> entries_;
};

/// One fully observed case: a value index per variable in schema order.
struct Example {
  std::vector<std::size_t> values;

  std::size_t operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const noexcept { return values.size(); }
  bool operator==(const Example&) const = default;
};

/// Throws DomainError unless `example` has one in-range value per variable.
void validate_example(const DomainSchema& schema, const Example& example);

}  // namespace bnrefine

#endif  // BNREFINE_SCHEMA_HPP
