#ifndef BNREFINE_COUNTS_HPP
#define BNREFINE_COUNTS_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "bnrefine/schema.hpp"

namespace bnrefine {

using ConfigIndex = std::uint64_t;

/// Maps an assignment of a parent set to a row index. Parents are kept in
/// ascending variable order and the last parent varies fastest, so the
/// rows enumerate like nested loops over the parents.
class ParentIndexer {
 public:
  ParentIndexer() = default;
  ParentIndexer(std::vector<std::size_t> parents, std::span<const std::size_t> all_arities);

  const std::vector<std::size_t>& parents() const noexcept { return parents_; }
  /// |v(parents)|; 1 for the empty set.
  ConfigIndex num_configs() const noexcept { return num_configs_; }

  ConfigIndex index(const Example& example) const;
  ConfigIndex index(std::span<const std::size_t> parent_values) const;
  std::vector<std::size_t> decode(ConfigIndex j) const;

 private:
  std::vector<std::size_t> parents_;
  std::vector<std::size_t> arities_;
  std::vector<ConfigIndex> strides_;
  ConfigIndex num_configs_ = 1;
};

/// Sparse sufficient statistics n_{x=i|j} for one family. Only parent
/// configurations that have been observed own a row.
class CountTable {
 public:
  struct Row {
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
    bool operator==(const Row&) const = default;
  };

  CountTable() = default;
  CountTable(std::size_t child_arity, ConfigIndex num_configs);

  std::size_t child_arity() const noexcept { return arity_; }
  ConfigIndex num_configs() const noexcept { return num_configs_; }
  std::uint64_t total() const noexcept { return total_; }

  /// Adds one observation and returns the row as it was before the increment.
  struct Before {
    std::uint64_t cell;
    std::uint64_t row_total;
  };
  Before add(ConfigIndex config, std::size_t value);

  /// Bulk insertion used when restoring saved state.
  void set_row(ConfigIndex config, std::vector<std::uint64_t> counts);

  const Row* row(ConfigIndex config) const;
  std::uint64_t count(ConfigIndex config, std::size_t value) const;
  const std::map<ConfigIndex, Row>& rows() const noexcept { return rows_; }

  bool operator==(const CountTable&) const = default;

 private:
  std::size_t arity_ = 0;
  ConfigIndex num_configs_ = 1;
  std::uint64_t total_ = 0;
  std::map<ConfigIndex, Row> rows_;
};

/// Counts for `child` given `parents` over a whole sample, by direct tally.
CountTable tally(std::size_t child, const ParentIndexer& parents, const DomainSchema& schema,
                 std::span<const Example> data);

}  // namespace bnrefine

#endif  // BNREFINE_COUNTS_HPP
