#ifndef BNREFINE_LATTICE_HPP
#define BNREFINE_LATTICE_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "bnrefine/counts.hpp"
#include "bnrefine/local_models.hpp"
#include "bnrefine/schema.hpp"

namespace bnrefine {

/// Bit k set means candidate parent k of the lattice's variable is in the
/// set. Mandatory parents are implicit in every node and never in the key.
using ParentBits = std::uint64_t;

enum class NodeStatus : std::uint8_t { Alive, Asleep, Dead };
enum class Expansion : std::uint8_t { Open, Closed };

struct LatticeNode {
  ParentBits bits = 0;
  std::vector<std::size_t> parents;  // mandatory ∪ selected candidates, ascending
  CountTable counts;
  double alpha_x = 0.0;
  double log_prior = 0.0;
  double log_ml = 0.0;     // exact Dirichlet marginal over absorbed examples
  double log_score = 0.0;  // log_prior + active score (log_ml or model slot)
  std::optional<local::LocalModelScore> model;
  NodeStatus status = NodeStatus::Alive;
  Expansion expansion = Expansion::Open;
  bool expanded = false;  // children have been generated
  std::size_t synced_through = 0;
  std::vector<ParentBits> sub_links;
  std::vector<ParentBits> super_links;

  bool operator==(const LatticeNode&) const = default;
};

/// The stored parent sets of one variable, keyed by candidate bitset.
class ParentLattice {
 public:
  ParentLattice() = default;
  /// Creates the lattice holding only its root: the mandatory parents,
  /// Alive and Open, with empty counts.
  ParentLattice(std::size_t x, const DomainSchema& schema, const ArcPriorMatrix& priors,
                const PriorConfig& config);

  std::size_t variable() const noexcept { return x_; }
  std::size_t child_arity() const noexcept { return arities_[x_]; }
  const std::vector<std::size_t>& candidates() const noexcept { return candidates_; }
  const std::vector<std::size_t>& mandatory() const noexcept { return mandatory_; }
  /// Prior of candidate k.
  double candidate_prior(std::size_t k) const { return candidate_priors_.at(k); }
  std::optional<std::size_t> candidate_slot(std::size_t variable) const;

  std::vector<std::size_t> parents_of(ParentBits bits) const;
  ParentIndexer indexer_of(ParentBits bits) const;
  double alpha_of(ParentBits bits) const;
  double log_prior_of(ParentBits bits) const;

  const LatticeNode& root() const { return nodes_.at(0); }
  const LatticeNode* find(ParentBits bits) const;
  LatticeNode* find(ParentBits bits);
  const LatticeNode& at(ParentBits bits) const;
  LatticeNode& at(ParentBits bits);
  bool contains(ParentBits bits) const { return nodes_.contains(bits); }

  /// Supersets of `bits` with one more candidate, ascending variable order.
  std::vector<ParentBits> children_of(ParentBits bits) const;

  /// Stores a node and links it to every stored set at Hamming distance one.
  /// Inserting an existing key is a no-op returning the stored node.
  LatticeNode& insert_node(ParentBits bits, CountTable counts, double log_ml,
                           std::size_t synced_through, NodeStatus status = NodeStatus::Alive);

  /// Alive nodes without an Alive stored strict superset.
  std::vector<const LatticeNode*> alive_leaves() const;
  std::vector<const LatticeNode*> alive_nodes() const;

  /// Dead is absorbing: reviving throws StateError. Dead forces Closed.
  void set_status(ParentBits bits, NodeStatus status);

  /// Updates the score from log_prior and the active score slot.
  void rescore(LatticeNode& node, bool use_model) const;

  /// Max log_score over Alive nodes, −∞ if none.
  double best_log_score() const noexcept { return best_log_score_; }
  void recompute_best();

  const std::map<ParentBits, LatticeNode>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  bool operator==(const ParentLattice&) const = default;

 private:
  friend struct LatticeAccess;

  std::size_t x_ = 0;
  std::vector<std::size_t> arities_;  // all variables
  double alpha_ = 1.0;
  std::vector<std::size_t> candidates_;
  std::vector<double> candidate_priors_;
  std::vector<std::size_t> mandatory_;
  std::map<ParentBits, LatticeNode> nodes_;
  double best_log_score_ = 0.0;
};

/// Restores a lattice from saved parts without re-deriving scores. Used by
/// session loading only.
struct LatticeAccess {
  static ParentLattice restore(std::size_t x, const DomainSchema& schema,
                               const ArcPriorMatrix& priors, const PriorConfig& config,
                               std::vector<LatticeNode> nodes);
};

}  // namespace bnrefine

#endif  // BNREFINE_LATTICE_HPP
