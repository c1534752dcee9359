#include "bnrefine/query.hpp"

#include <algorithm>
#include <cmath>

#include "bnrefine/error.hpp"
#include "bnrefine/math.hpp"
#include "bnrefine/random.hpp"

namespace bnrefine {

std::vector<NodeWeight> normalized_alive_weights(const ParentLattice& lattice) {
  std::vector<NodeWeight> out;
  std::vector<double> scores;
  for (const auto& [bits, node] : lattice.nodes()) {
    if (node.status != NodeStatus::Alive) continue;
    out.push_back({bits, 0.0});
    scores.push_back(node.log_score);
  }
  const double z = log_sum_exp(scores);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].weight = std::exp(scores[i] - z);
  return out;
}

namespace {

double arc_from_weights(const ParentLattice& lattice, const std::vector<NodeWeight>& weights,
                        std::size_t y) {
  const auto& mand = lattice.mandatory();
  if (std::find(mand.begin(), mand.end(), y) != mand.end()) return 1.0;
  const auto slot = lattice.candidate_slot(y);
  if (!slot) return 0.0;
  const ParentBits bit = ParentBits{1} << *slot;
  double p = 0.0;
  for (const auto& w : weights)
    if (w.bits & bit) p += w.weight;
  return std::min(p, 1.0);
}

}  // namespace

double arc_posterior(const CombinedNetwork& net, std::size_t y, std::size_t x) {
  if (x >= net.size() || y >= x) throw DomainError("arc posterior needs y before x");
  const auto& lat = net.lattice(x);
  return arc_from_weights(lat, normalized_alive_weights(lat), y);
}

ArcPosteriorMatrix all_arc_posteriors(const CombinedNetwork& net) {
  ArcPosteriorMatrix m;
  m.num_variables = net.size();
  for (std::size_t x = 0; x < net.size(); ++x) {
    const auto& lat = net.lattice(x);
    const auto weights = normalized_alive_weights(lat);
    for (std::size_t y = 0; y < x; ++y) m.entries[{y, x}] = arc_from_weights(lat, weights, y);
  }
  return m;
}

std::vector<LeafMass> leaf_masses(const ParentLattice& lattice) {
  const auto weights = normalized_alive_weights(lattice);
  std::vector<LeafMass> out;
  for (const auto* leaf : lattice.alive_leaves()) {
    LeafMass lm{leaf->bits, 0.0, {}};
    for (const auto& w : weights) {
      if ((w.bits & leaf->bits) == w.bits) {
        lm.mass += w.weight;
        lm.subsets.push_back(w.bits);
      }
    }
    out.push_back(std::move(lm));
  }
  return out;
}

SmoothedFamily smooth_family(const ParentLattice& lattice, ParentBits leaf) {
  const auto weights = normalized_alive_weights(lattice);
  std::vector<NodeWeight> members;
  double mass = 0.0;
  for (const auto& w : weights) {
    if ((w.bits & leaf) == w.bits) {
      members.push_back(w);
      mass += w.weight;
    }
  }
  if (members.empty()) throw StateError("leaf has no Alive subsets");

  SmoothedFamily fam;
  fam.variable = lattice.variable();
  fam.leaf = leaf;
  fam.parents = lattice.parents_of(leaf);
  fam.mass = std::min(mass, 1.0);

  const ParentIndexer leaf_idx = lattice.indexer_of(leaf);
  if (leaf_idx.num_configs() > (ConfigIndex{1} << 20))
    throw StructuralError("leaf parent set too large to smooth");
  const std::size_t m = lattice.child_arity();
  fam.cpt.arity = m;
  fam.cpt.num_configs = static_cast<std::size_t>(leaf_idx.num_configs());
  fam.cpt.probs.assign(m * fam.cpt.num_configs, 0.0);

  for (const auto& w : members) {
    const LatticeNode& node = lattice.at(w.bits);
    const double share = w.weight / mass;
    // Position of each of this node's parents within the leaf's parent list.
    std::vector<std::size_t> pos;
    for (std::size_t p : node.parents)
      pos.push_back(static_cast<std::size_t>(
          std::find(fam.parents.begin(), fam.parents.end(), p) - fam.parents.begin()));
    const ParentIndexer sub_idx = lattice.indexer_of(w.bits);
    std::vector<std::size_t> sub_values(pos.size());
    for (std::size_t j = 0; j < fam.cpt.num_configs; ++j) {
      const auto leaf_values = leaf_idx.decode(j);
      for (std::size_t k = 0; k < pos.size(); ++k) sub_values[k] = leaf_values[pos[k]];
      const auto row = expected_row(node.counts, sub_idx.index(sub_values), node.alpha_x);
      auto out = fam.cpt.row(j);
      for (std::size_t i = 0; i < m; ++i) out[i] += share * row[i];
    }
  }

  for (std::size_t p : fam.parents) {
    double prob = 0.0;
    if (const auto slot = lattice.candidate_slot(p)) {
      const ParentBits bit = ParentBits{1} << *slot;
      for (const auto& w : members)
        if (w.bits & bit) prob += w.weight / mass;
    } else {
      prob = 1.0;  // mandatory
    }
    fam.arc_probabilities.emplace_back(p, std::min(prob, 1.0));
  }
  return fam;
}

SmoothedNetwork sample_smoothed(const CombinedNetwork& net, std::uint64_t seed) {
  Rng rng(seed);
  SmoothedNetwork out;
  out.schema = net.schema();
  for (const auto& lat : net.lattices()) {
    const auto leaves = leaf_masses(lat);
    if (leaves.empty()) throw StateError("lattice has no Alive node");
    std::vector<double> masses;
    for (const auto& l : leaves) masses.push_back(l.mass);
    const std::size_t pick = rng.categorical(masses);
    out.families.push_back(smooth_family(lat, leaves[pick].leaf));
  }
  return out;
}

ConcreteNetwork SmoothedNetwork::network() const {
  std::vector<std::vector<std::size_t>> parents;
  std::vector<Cpt> cpts;
  for (const auto& f : families) {
    parents.push_back(f.parents);
    cpts.push_back(f.cpt);
  }
  return ConcreteNetwork(schema, std::move(parents), std::move(cpts));
}

double loglik_dataset(const ConcreteNetwork& network, std::span<const Example> data) {
  double total = 0.0;
  for (const auto& ex : data) total += joint_log_likelihood(network, ex);
  return total;
}

}  // namespace bnrefine
