#ifndef BNREFINE_TESTS_FIXTURES_HPP
#define BNREFINE_TESTS_FIXTURES_HPP

#include <bnrefine/counts.hpp>
#include <bnrefine/engine.hpp>
#include <bnrefine/math.hpp>
#include <bnrefine/network.hpp>
#include <bnrefine/random.hpp>
#include <bnrefine/sampler.hpp>

#include <cstdint>
#include <vector>

namespace bnrefine::fixtures {

/// Random tables for a fixed structure; rows are Dirichlet(1)-like draws
/// bounded away from zero.
inline ConcreteNetwork random_network(const DomainSchema& schema,
                                      std::vector<std::vector<std::size_t>> parents,
                                      std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Cpt> cpts;
  const auto arities = schema.arities();
  for (std::size_t x = 0; x < schema.size(); ++x) {
    ParentIndexer idx(parents[x], arities);
    Cpt t;
    t.arity = arities[x];
    t.num_configs = static_cast<std::size_t>(idx.num_configs());
    for (std::size_t j = 0; j < t.num_configs; ++j) {
      std::vector<double> row(t.arity);
      double s = 0.0;
      for (auto& r : row) s += (r = 0.05 + rng.uniform());
      for (auto r : row) t.probs.push_back(r / s);
    }
    cpts.push_back(std::move(t));
  }
  return ConcreteNetwork(schema, std::move(parents), std::move(cpts));
}

/// Binary table from P(value 1 | config) per configuration.
inline Cpt binary_cpt(std::vector<double> p_true) {
  Cpt t;
  t.arity = 2;
  t.num_configs = p_true.size();
  for (double p : p_true) {
    t.probs.push_back(1.0 - p);
    t.probs.push_back(p);
  }
  return t;
}

/// Six binary variables: chain v0→v1→v2→v3, root v4, and the v-structure
/// v3→v5←v4. Every row is at least 0.2 away from uniform.
inline ConcreteNetwork recovery_truth() {
  auto schema = DomainSchema::binary(6);
  std::vector<std::vector<std::size_t>> parents{{}, {0}, {1}, {2}, {}, {3, 4}};
  std::vector<Cpt> cpts{
      binary_cpt({0.25}),
      binary_cpt({0.2, 0.8}),
      binary_cpt({0.8, 0.2}),
      binary_cpt({0.2, 0.8}),
      binary_cpt({0.7}),
      binary_cpt({0.1, 0.75, 0.8, 0.95}),
  };
  return ConcreteNetwork(schema, std::move(parents), std::move(cpts));
}

/// Five binary variables with a moderately informative structure, for the
/// oracle-comparison runs.
inline ConcreteNetwork five_variable_truth() {
  auto schema = DomainSchema::binary(5);
  std::vector<std::vector<std::size_t>> parents{{}, {0}, {0, 1}, {2}, {1, 3}};
  std::vector<Cpt> cpts{
      binary_cpt({0.4}),
      binary_cpt({0.3, 0.7}),
      binary_cpt({0.2, 0.6, 0.5, 0.9}),
      binary_cpt({0.25, 0.7}),
      binary_cpt({0.3, 0.6, 0.55, 0.8}),
  };
  return ConcreteNetwork(schema, std::move(parents), std::move(cpts));
}

/// From-scratch count table and marginal for one stored node.
struct BatchScore {
  CountTable counts;
  double log_ml;
};
inline BatchScore batch_score(const CombinedNetwork& net, std::size_t x, const LatticeNode& node) {
  ParentIndexer idx(node.parents, net.schema().arities());
  CountTable counts = tally(x, idx, net.schema(), net.example_log());
  const double a = alpha_for(x, node.parents, net.config(), net.schema());
  return {counts, log_marginal_likelihood(counts, a)};
}

inline SearchParams permissive_params() {
  SearchParams p;
  p.c_alive = 1e-12;
  p.d_open = 1e-12;
  p.e_dead = 1e-12;
  return p;
}

}  // namespace bnrefine::fixtures

#endif  // BNREFINE_TESTS_FIXTURES_HPP
