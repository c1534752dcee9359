#include "bnrefine/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bnrefine/error.hpp"

namespace bnrefine {

ConcreteNetwork::ConcreteNetwork(DomainSchema schema, std::vector<std::vector<std::size_t>> parents,
                                 std::vector<Cpt> cpts)
    : schema_(std::move(schema)), parents_(std::move(parents)), cpts_(std::move(cpts)) {
  const std::size_t n = schema_.size();
  if (parents_.size() != n || cpts_.size() != n)
    throw StructuralError("network needs one parent set and one table per variable");
  const auto arities = schema_.arities();
  indexers_.reserve(n);
  for (std::size_t x = 0; x < n; ++x) {
    auto& ps = parents_[x];
    std::sort(ps.begin(), ps.end());
    if (std::adjacent_find(ps.begin(), ps.end()) != ps.end())
      throw StructuralError("repeated parent of '" + schema_.variable(x).name + "'");
    for (std::size_t y : ps)
      if (y >= x)
        throw StructuralError("parent of '" + schema_.variable(x).name +
                              "' does not precede it in the ordering");
    indexers_.emplace_back(ps, arities);
    const Cpt& t = cpts_[x];
    if (t.arity != arities[x] || t.num_configs != indexers_.back().num_configs() ||
        t.probs.size() != t.arity * t.num_configs)
      throw StructuralError("table shape mismatch for '" + schema_.variable(x).name + "'");
    for (std::size_t j = 0; j < t.num_configs; ++j) {
      double s = 0.0;
      for (double p : t.row(j)) {
        if (!(p >= 0.0 && p <= 1.0))
          throw StructuralError("table entry outside [0,1] for '" + schema_.variable(x).name + "'");
        s += p;
      }
      if (std::abs(s - 1.0) > 1e-9)
        throw StructuralError("table row does not sum to 1 for '" + schema_.variable(x).name + "'");
    }
  }
}

double ConcreteNetwork::probability(std::size_t x, const Example& example) const {
  const auto j = static_cast<std::size_t>(indexers_[x].index(example));
  return cpts_[x].at(j, example[x]);
}

double joint_log_likelihood(const ConcreteNetwork& network, const Example& example) {
  validate_example(network.schema(), example);
  double ll = 0.0;
  for (std::size_t x = 0; x < network.size(); ++x) {
    const double p = network.probability(x, example);
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    ll += std::log(p);
  }
  return ll;
}

}  // namespace bnrefine
