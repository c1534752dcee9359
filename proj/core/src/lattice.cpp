#include "bnrefine/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "bnrefine/error.hpp"
#include "bnrefine/math.hpp"

namespace bnrefine {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxCandidates = 64;
}  // namespace

ParentLattice::ParentLattice(std::size_t x, const DomainSchema& schema,
                             const ArcPriorMatrix& priors, const PriorConfig& config)
    : x_(x), arities_(schema.arities()), alpha_(config.alpha) {
  config.validate();
  if (x >= schema.size()) throw ConfigError("lattice variable out of range");
  if (priors.num_variables() != schema.size())
    throw ConfigError("arc prior matrix does not match the schema");
  for (std::size_t y = 0; y < x; ++y) {
    const double p = priors.prior(y, x);
    if (p == 1.0) {
      mandatory_.push_back(y);
    } else if (p > 0.0) {
      candidates_.push_back(y);
      candidate_priors_.push_back(p);
    }
  }
  if (candidates_.size() > kMaxCandidates)
    throw ConfigError("more than 64 candidate parents for '" + schema.variable(x).name + "'");

  auto idx = indexer_of(0);
  LatticeNode& root = insert_node(0, CountTable(child_arity(), idx.num_configs()), 0.0, 0);
  root.status = NodeStatus::Alive;
  root.expansion = Expansion::Open;
  recompute_best();
}

std::optional<std::size_t> ParentLattice::candidate_slot(std::size_t variable) const {
  auto it = std::find(candidates_.begin(), candidates_.end(), variable);
  if (it == candidates_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - candidates_.begin());
}

std::vector<std::size_t> ParentLattice::parents_of(ParentBits bits) const {
  std::vector<std::size_t> out = mandatory_;
  for (std::size_t k = 0; k < candidates_.size(); ++k)
    if (bits >> k & 1U) out.push_back(candidates_[k]);
  std::sort(out.begin(), out.end());
  return out;
}

ParentIndexer ParentLattice::indexer_of(ParentBits bits) const {
  return ParentIndexer(parents_of(bits), arities_);
}

double ParentLattice::alpha_of(ParentBits bits) const {
  double configs = 1.0;
  for (std::size_t y : parents_of(bits)) configs *= static_cast<double>(arities_[y]);
  return alpha_ / (static_cast<double>(arities_[x_]) * configs);
}

double ParentLattice::log_prior_of(ParentBits bits) const {
  // Mandatory and forbidden arcs contribute ln 1.
  double lp = 0.0;
  for (std::size_t k = 0; k < candidates_.size(); ++k) {
    const double p = candidate_priors_[k];
    lp += (bits >> k & 1U) ? std::log(p) : std::log1p(-p);
  }
  return lp;
}

const LatticeNode* ParentLattice::find(ParentBits bits) const {
  auto it = nodes_.find(bits);
  return it == nodes_.end() ? nullptr : &it->second;
}

LatticeNode* ParentLattice::find(ParentBits bits) {
  auto it = nodes_.find(bits);
  return it == nodes_.end() ? nullptr : &it->second;
}

const LatticeNode& ParentLattice::at(ParentBits bits) const {
  const auto* n = find(bits);
  if (!n) throw StateError("parent set not stored in lattice");
  return *n;
}

LatticeNode& ParentLattice::at(ParentBits bits) {
  auto* n = find(bits);
  if (!n) throw StateError("parent set not stored in lattice");
  return *n;
}

std::vector<ParentBits> ParentLattice::children_of(ParentBits bits) const {
  std::vector<ParentBits> out;
  for (std::size_t k = 0; k < candidates_.size(); ++k) {
    const ParentBits b = ParentBits{1} << k;
    if (!(bits & b)) out.push_back(bits | b);
  }
  return out;
}

LatticeNode& ParentLattice::insert_node(ParentBits bits, CountTable counts, double log_ml,
                                        std::size_t synced_through, NodeStatus status) {
  if (auto* existing = find(bits)) return *existing;
  const ParentBits valid =
      candidates_.size() == 64 ? ~ParentBits{0} : (ParentBits{1} << candidates_.size()) - 1;
  if (bits & ~valid) throw StructuralError("parent set includes a non-candidate");

  LatticeNode node;
  node.bits = bits;
  node.parents = parents_of(bits);
  const auto idx = ParentIndexer(node.parents, arities_);
  if (counts.child_arity() != arities_[x_] || counts.num_configs() != idx.num_configs())
    throw StructuralError("count table does not match parent set");
  node.counts = std::move(counts);
  node.alpha_x = alpha_of(bits);
  node.log_prior = log_prior_of(bits);
  node.log_ml = log_ml;
  node.log_score = node.log_prior + log_ml;
  node.status = status;
  node.expansion = status == NodeStatus::Dead ? Expansion::Closed : Expansion::Open;
  node.synced_through = synced_through;

  for (std::size_t k = 0; k < candidates_.size(); ++k) {
    const ParentBits flipped = bits ^ (ParentBits{1} << k);
    auto it = nodes_.find(flipped);
    if (it == nodes_.end()) continue;
    auto& mine = (flipped & bits) == flipped ? node.sub_links : node.super_links;
    auto& theirs = (flipped & bits) == flipped ? it->second.super_links : it->second.sub_links;
    mine.push_back(flipped);
    theirs.insert(std::upper_bound(theirs.begin(), theirs.end(), bits), bits);
  }
  std::sort(node.sub_links.begin(), node.sub_links.end());
  std::sort(node.super_links.begin(), node.super_links.end());

  auto [it, ok] = nodes_.emplace(bits, std::move(node));
  if (it->second.status == NodeStatus::Alive && it->second.log_score > best_log_score_)
    best_log_score_ = it->second.log_score;
  if (nodes_.size() == 1) recompute_best();
  return it->second;
}

std::vector<const LatticeNode*> ParentLattice::alive_nodes() const {
  std::vector<const LatticeNode*> out;
  for (const auto& [bits, node] : nodes_)
    if (node.status == NodeStatus::Alive) out.push_back(&node);
  return out;
}

std::vector<const LatticeNode*> ParentLattice::alive_leaves() const {
  const auto alive = alive_nodes();
  std::vector<const LatticeNode*> out;
  for (const auto* a : alive) {
    const bool covered = std::any_of(alive.begin(), alive.end(), [&](const LatticeNode* b) {
      return b->bits != a->bits && (a->bits & b->bits) == a->bits;
    });
    if (!covered) out.push_back(a);
  }
  return out;
}

void ParentLattice::set_status(ParentBits bits, NodeStatus status) {
  LatticeNode& node = at(bits);
  if (node.status == status) return;
  if (node.status == NodeStatus::Dead) throw StateError("dead lattice nodes cannot be revived");
  const bool alive_changed = node.status == NodeStatus::Alive || status == NodeStatus::Alive;
  node.status = status;
  if (status == NodeStatus::Dead) node.expansion = Expansion::Closed;
  if (alive_changed) recompute_best();
}

void ParentLattice::rescore(LatticeNode& node, bool use_model) const {
  const double s = use_model && node.model ? node.model->log_marginal : node.log_ml;
  node.log_score = node.log_prior + s;
}

void ParentLattice::recompute_best() {
  best_log_score_ = kNegInf;
  for (const auto& [bits, node] : nodes_)
    if (node.status == NodeStatus::Alive) best_log_score_ = std::max(best_log_score_, node.log_score);
}

ParentLattice LatticeAccess::restore(std::size_t x, const DomainSchema& schema,
                                     const ArcPriorMatrix& priors, const PriorConfig& config,
                                     std::vector<LatticeNode> nodes) {
  ParentLattice lattice(x, schema, priors, config);
  lattice.nodes_.clear();
  for (auto& n : nodes) {
    const ParentBits b = n.bits;
    lattice.nodes_.emplace(b, std::move(n));
  }
  if (!lattice.nodes_.contains(0)) throw StructuralError("restored lattice lacks its root");
  lattice.recompute_best();
  return lattice;
}

}  // namespace bnrefine
