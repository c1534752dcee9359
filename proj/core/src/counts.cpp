#include "bnrefine/counts.hpp"

#include <algorithm>
#include <limits>

#include "bnrefine/error.hpp"

namespace bnrefine {

ParentIndexer::ParentIndexer(std::vector<std::size_t> parents,
                             std::span<const std::size_t> all_arities)
    : parents_(std::move(parents)) {
  std::sort(parents_.begin(), parents_.end());
  arities_.reserve(parents_.size());
  strides_.assign(parents_.size(), 1);
  for (std::size_t p : parents_) {
    if (p >= all_arities.size()) throw StructuralError("parent index out of range");
    arities_.push_back(all_arities[p]);
  }
  ConfigIndex stride = 1;
  for (std::size_t k = parents_.size(); k-- > 0;) {
    strides_[k] = stride;
    if (stride > std::numeric_limits<ConfigIndex>::max() / arities_[k])
      throw StructuralError("parent configuration space overflows 64 bits");
    stride *= arities_[k];
  }
  num_configs_ = stride;
}

ConfigIndex ParentIndexer::index(const Example& example) const {
  ConfigIndex j = 0;
  for (std::size_t k = 0; k < parents_.size(); ++k) j += strides_[k] * example[parents_[k]];
  return j;
}

ConfigIndex ParentIndexer::index(std::span<const std::size_t> parent_values) const {
  if (parent_values.size() != parents_.size()) throw StructuralError("parent value count mismatch");
  ConfigIndex j = 0;
  for (std::size_t k = 0; k < parents_.size(); ++k) j += strides_[k] * parent_values[k];
  return j;
}

std::vector<std::size_t> ParentIndexer::decode(ConfigIndex j) const {
  std::vector<std::size_t> values(parents_.size());
  for (std::size_t k = 0; k < parents_.size(); ++k) {
    values[k] = static_cast<std::size_t>(j / strides_[k]);
    j %= strides_[k];
  }
  return values;
}

CountTable::CountTable(std::size_t child_arity, ConfigIndex num_configs)
    : arity_(child_arity), num_configs_(num_configs) {}

CountTable::Before CountTable::add(ConfigIndex config, std::size_t value) {
  if (value >= arity_ || config >= num_configs_) throw StructuralError("count cell out of range");
  auto [it, fresh] = rows_.try_emplace(config);
  Row& r = it->second;
  if (fresh) r.counts.assign(arity_, 0);
  Before before{r.counts[value], r.total};
  ++r.counts[value];
  ++r.total;
  ++total_;
  return before;
}

void CountTable::set_row(ConfigIndex config, std::vector<std::uint64_t> counts) {
  if (counts.size() != arity_ || config >= num_configs_) throw StructuralError("bad count row");
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  auto it = rows_.find(config);
  if (it != rows_.end()) {
    total_ -= it->second.total;
    rows_.erase(it);
  }
  if (sum == 0) return;
  rows_.emplace(config, Row{std::move(counts), sum});
  total_ += sum;
}

const CountTable::Row* CountTable::row(ConfigIndex config) const {
  auto it = rows_.find(config);
  return it == rows_.end() ? nullptr : &it->second;
}

std::uint64_t CountTable::count(ConfigIndex config, std::size_t value) const {
  const Row* r = row(config);
  return r ? r->counts.at(value) : 0;
}

CountTable tally(std::size_t child, const ParentIndexer& parents, const DomainSchema& schema,
                 std::span<const Example> data) {
  CountTable table(schema.arity(child), parents.num_configs());
  for (const auto& ex : data) table.add(parents.index(ex), ex[child]);
  return table;
}

}  // namespace bnrefine
