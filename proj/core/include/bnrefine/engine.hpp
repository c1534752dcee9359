#ifndef BNREFINE_ENGINE_HPP
#define BNREFINE_ENGINE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bnrefine/lattice.hpp"
#include "bnrefine/local_models.hpp"
#include "bnrefine/network.hpp"
#include "bnrefine/schema.hpp"

namespace bnrefine {

/// Beam-search thresholds, all ratios against the best posterior found:
/// nodes within `c_alive` are Alive, within `d_open` are expanded, and below
/// `e_dead` (once their counts satisfy the sample-size test) are Dead.
struct SearchParams {
  double c_alive = 0.1;
  double d_open = 0.01;
  double e_dead = 0.001;
  /// Demotion happens only below threshold × hysteresis.
  double hysteresis = 0.5;
  /// A node may die once it has absorbed dead_kappa · m_x · |v(Π_x)| examples.
  double dead_kappa = 5.0;
  /// Maximum node expansions per refine call; unlimited when empty.
  std::optional<std::size_t> budget;

  /// Requires 1 > c_alive ≥ d_open ≥ e_dead > 0, hysteresis in (0,1],
  /// dead_kappa ≥ 0.
  void validate() const;
};

/// Cumulative instrumentation, persisted with the session.
struct EngineCounters {
  std::uint64_t expansions = 0;
  std::uint64_t nodes_created = 0;
  std::uint64_t nodes_killed = 0;
  /// Attempts to expand or revive a Dead node. Must stay zero.
  std::uint64_t dead_violations = 0;

  bool operator==(const EngineCounters&) const = default;
};

/// Every variable's parent lattice plus the retained example log.
class CombinedNetwork {
 public:
  CombinedNetwork() = default;
  CombinedNetwork(DomainSchema schema, ArcPriorMatrix priors, PriorConfig config,
                  local::ModelKind score_model = local::ModelKind::FullTable);

  const DomainSchema& schema() const noexcept { return schema_; }
  const ArcPriorMatrix& priors() const noexcept { return priors_; }
  const PriorConfig& config() const noexcept { return config_; }
  local::ModelKind score_model() const noexcept { return score_model_; }
  bool uses_model_slot() const noexcept { return score_model_ != local::ModelKind::FullTable; }
  const local::LocalPrior& local_prior() const noexcept { return local_prior_; }

  std::size_t size() const noexcept { return lattices_.size(); }
  const ParentLattice& lattice(std::size_t x) const { return lattices_.at(x); }
  ParentLattice& lattice(std::size_t x) { return lattices_.at(x); }
  const std::vector<ParentLattice>& lattices() const noexcept { return lattices_; }

  const std::vector<Example>& example_log() const noexcept { return log_; }
  std::size_t n_total() const noexcept { return log_.size(); }

  const EngineCounters& counters() const noexcept { return counters_; }
  EngineCounters& counters() noexcept { return counters_; }

  /// P: total stored nodes across lattices.
  std::size_t total_nodes() const;

  bool operator==(const CombinedNetwork&) const = default;

 private:
  friend void observe(CombinedNetwork&, const Example&);
  friend void set_score_model(CombinedNetwork&, local::ModelKind);
  friend struct SessionAccess;

  DomainSchema schema_;
  ArcPriorMatrix priors_;
  PriorConfig config_;
  local::ModelKind score_model_ = local::ModelKind::FullTable;
  local::LocalPrior local_prior_;
  std::vector<ParentLattice> lattices_;
  std::vector<Example> log_;
  EngineCounters counters_;
};

/// One root-only lattice per variable.
CombinedNetwork init(DomainSchema schema, ArcPriorMatrix priors, PriorConfig config,
                     local::ModelKind score_model = local::ModelKind::FullTable);

/// Appends the example and updates every Alive node's counts and score by
/// the Dirichlet predictive factor. Rejects a bad example without changing
/// any state. Asleep nodes are brought up to date lazily.
void observe(CombinedNetwork& net, const Example& example);

/// Validates all examples first, then observes them in order.
void observe_batch(CombinedNetwork& net, std::span<const Example> examples);

/// Replays the log entries this node has not absorbed yet.
void sync_node(CombinedNetwork& net, std::size_t x, ParentBits bits);

/// Switches which score slot drives search and queries, rescoring all
/// up-to-date nodes.
void set_score_model(CombinedNetwork& net, local::ModelKind kind);

struct SearchReport {
  std::size_t expansions = 0;
  std::size_t nodes_created = 0;
  std::size_t nodes_killed = 0;
  bool exhausted = false;  // every Open queue drained
  std::vector<double> best_log_scores;
};

/// Any-time beam search over every lattice, in variable order, sharing
/// one expansion budget. Stopping and resuming with the remaining budget
/// reaches the same state as one uninterrupted call.
SearchReport refine(CombinedNetwork& net, const SearchParams& params);

/// Brings every non-dead node up to date and re-applies the thresholds
/// against the current best, with hysteresis on demotion.
void rethreshold(CombinedNetwork& net, const SearchParams& params);

/// True once the node has absorbed at least κ · m_x · |v(Π_x)| examples.
bool dead_condition(const LatticeNode& node, std::size_t child_arity, double dead_kappa);

/// Per variable, the highest-scoring Alive parent set (ties to the smaller
/// bitset) with posterior-mean tables.
ConcreteNetwork best_network(const CombinedNetwork& net);

}  // namespace bnrefine

#endif  // BNREFINE_ENGINE_HPP
