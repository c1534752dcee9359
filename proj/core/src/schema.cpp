#include "bnrefine/schema.hpp"

#include <cmath>
#include <set>

#include "bnrefine/error.hpp"

namespace bnrefine {

DomainSchema::DomainSchema(std::vector<VariableSpec> variables) : variables_(std::move(variables)) {
  std::set<std::string_view> names;
  for (const auto& v : variables_) {
    if (v.name.empty()) throw ConfigError("variable with empty name");
    if (!names.insert(v.name).second) throw ConfigError("duplicate variable name '" + v.name + "'");
    if (v.arity() < 2)
      throw ConfigError("variable '" + v.name + "' needs at least two values");
    std::set<std::string_view> labels;
    for (const auto& label : v.values) {
      if (!labels.insert(label).second)
        throw ConfigError("variable '" + v.name + "' repeats value '" + label + "'");
    }
  }
}

DomainSchema DomainSchema::binary(std::size_t count) {
  std::vector<VariableSpec> vars;
  vars.reserve(count);
  for (std::size_t i = 0; i < count; ++i) vars.push_back({"v" + std::to_string(i), {"0", "1"}});
  return DomainSchema(std::move(vars));
}

std::vector<std::size_t> DomainSchema::arities() const {
  std::vector<std::size_t> out;
  out.reserve(variables_.size());
  for (const auto& v : variables_) out.push_back(v.arity());
  return out;
}

std::optional<std::size_t> DomainSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i].name == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> DomainSchema::value_index(std::size_t var, std::string_view label) const {
  const auto& values = variables_.at(var).values;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] == label) return i;
  return std::nullopt;
}

void PriorConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be positive and finite");
}

ArcPriorMatrix::ArcPriorMatrix(std::size_t num_variables, double default_prior)
    : n_(num_variables), default_prior_(default_prior) {
  if (!(default_prior >= 0.0 && default_prior <= 1.0))
    throw ConfigError("default arc prior must lie in [0,1]");
}

void ArcPriorMatrix::set(std::size_t y, std::size_t x, double p) {
  if (x >= n_ || y >= n_) throw ConfigError("arc endpoint out of range");
  if (y >= x) throw ConfigError("arc " + std::to_string(y) + "->" + std::to_string(x) +
                                " violates the variable ordering");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("arc prior must lie in [0,1]");
  auto it = entries_.find({y, x});
  if (it != entries_.end()) {
    const bool old_hard = it->second == 0.0 || it->second == 1.0;
    const bool new_hard = p == 0.0 || p == 1.0;
    if (old_hard && new_hard && it->second != p)
      throw ConfigError("contradictory hard arc " + std::to_string(y) + "->" + std::to_string(x));
    it->second = p;
    return;
  }
  entries_.emplace(Key{y, x}, p);
}

double ArcPriorMatrix::prior(std::size_t y, std::size_t x) const {
  auto it = entries_.find({y, x});
  return it == entries_.end() ? default_prior_ : it->second;
}

bool ArcPriorMatrix::has_entry(std::size_t y, std::size_t x) const {
  return entries_.contains({y, x});
}

void validate_example(const DomainSchema& schema, const Example& example) {
  if (example.size() != schema.size())
    throw DomainError("example has " + std::to_string(example.size()) + " values, schema has " +
                      std::to_string(schema.size()) + " variables");
  for (std::size_t i = 0; i < example.size(); ++i) {
    if (example[i] >= schema.arity(i))
      throw DomainError("value " + std::to_string(example[i]) + " out of range for variable '" +
                        schema.variable(i).name + "'");
  }
}

}  // namespace bnrefine
