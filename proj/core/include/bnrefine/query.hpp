#ifndef BNREFINE_QUERY_HPP
#define BNREFINE_QUERY_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "bnrefine/engine.hpp"
#include "bnrefine/network.hpp"

namespace bnrefine {

/// Posterior probability of each arc y→x with y before x.
struct ArcPosteriorMatrix {
  std::size_t num_variables = 0;
  std::map<std::pair<std::size_t, std::size_t>, double> entries;

  double at(std::size_t y, std::size_t x) const { return entries.at({y, x}); }
  bool operator==(const ArcPosteriorMatrix&) const = default;
};

/// Alive nodes' posteriors normalised within the lattice (log-sum-exp).
struct NodeWeight {
  ParentBits bits;
  double weight;
};
std::vector<NodeWeight> normalized_alive_weights(const ParentLattice& lattice);

/// Σ of normalised Alive weights over sets containing y. Mandatory arcs
/// give 1 and forbidden arcs 0. DomainError unless y precedes x.
double arc_posterior(const CombinedNetwork& net, std::size_t y, std::size_t x);

ArcPosteriorMatrix all_arc_posteriors(const CombinedNetwork& net);

/// An Alive leaf and the posterior mass of its stored Alive subsets.
struct LeafMass {
  ParentBits leaf;
  double mass;
  std::vector<ParentBits> subsets;  // S_x, including the leaf
};
std::vector<LeafMass> leaf_masses(const ParentLattice& lattice);

struct SmoothedFamily {
  std::size_t variable = 0;
  ParentBits leaf = 0;
  std::vector<std::size_t> parents;  // parents of the leaf
  Cpt cpt;                           // averaged over S_x, indexed by the leaf's configurations
  std::vector<std::pair<std::size_t, double>> arc_probabilities;  // for each leaf parent
  double mass = 0.0;                                              // Pr(S_x | data)
};

struct SmoothedNetwork {
  DomainSchema schema;
  std::vector<SmoothedFamily> families;

  ConcreteNetwork network() const;
};

/// Averages the tables of every stored Alive subset of `leaf`, weighted by
/// posterior, into one table over the leaf's parent configurations.
SmoothedFamily smooth_family(const ParentLattice& lattice, ParentBits leaf);

/// Draws one leaf per variable in proportion to its S_x mass (masses are
/// renormalised across leaves since S_x sets can overlap) and merges.
SmoothedNetwork sample_smoothed(const CombinedNetwork& net, std::uint64_t seed);

/// Σ over examples of joint_log_likelihood.
double loglik_dataset(const ConcreteNetwork& network, std::span<const Example> data);

}  // namespace bnrefine

#endif  // BNREFINE_QUERY_HPP
