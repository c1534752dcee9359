#include "bnrefine/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "bnrefine/error.hpp"
#include "bnrefine/math.hpp"

namespace bnrefine {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

ConfigIndex config_of(const std::vector<std::size_t>& parents,
                      const std::vector<VariableSpec>& vars, const Example& ex) {
  ConfigIndex j = 0;
  for (std::size_t p : parents) j = j * vars[p].arity() + ex[p];
  return j;
}

/// Adds one example to a node: the Dirichlet predictive factor evaluated
/// with the counts before the increment.
void absorb(LatticeNode& node, std::size_t x, const std::vector<VariableSpec>& vars,
            const Example& ex) {
  const auto before = node.counts.add(config_of(node.parents, vars, ex), ex[x]);
  const double m = static_cast<double>(vars[x].arity());
  node.log_ml += std::log((static_cast<double>(before.cell) + node.alpha_x) /
                          (static_cast<double>(before.row_total) + m * node.alpha_x));
}

struct QueueKey {
  double score;
  ParentBits bits;
  bool operator<(const QueueKey& o) const {
    if (score != o.score) return score > o.score;
    return bits < o.bits;
  }
};

struct Thresholds {
  double log_c, log_d, log_e, log_h, kappa;
  explicit Thresholds(const SearchParams& p)
      : log_c(std::log(p.c_alive)),
        log_d(std::log(p.d_open)),
        log_e(std::log(p.e_dead)),
        log_h(std::log(p.hysteresis)),
        kappa(p.dead_kappa) {}
};

}  // namespace

void SearchParams::validate() const {
  if (!(c_alive < 1.0 && c_alive >= d_open && d_open >= e_dead && e_dead > 0.0))
    throw ConfigError("search thresholds must satisfy 1 > c_alive >= d_open >= e_dead > 0");
  if (!(hysteresis > 0.0 && hysteresis <= 1.0)) throw ConfigError("hysteresis must lie in (0,1]");
  if (!(dead_kappa >= 0.0) || !std::isfinite(dead_kappa))
    throw ConfigError("dead_kappa must be non-negative");
}

CombinedNetwork::CombinedNetwork(DomainSchema schema, ArcPriorMatrix priors, PriorConfig config,
                                 local::ModelKind score_model)
    : schema_(std::move(schema)),
      priors_(std::move(priors)),
      config_(config),
      score_model_(score_model) {
  config_.validate();
  if (priors_.num_variables() != schema_.size())
    throw ConfigError("arc prior matrix does not match the schema");
  for (const auto& [key, p] : priors_.entries()) {
    if (key.first >= key.second) throw ConfigError("arc prior entry violates the ordering");
  }
  if (score_model_ != local::ModelKind::FullTable) {
    for (const auto& v : schema_.variables())
      if (v.arity() != 2)
        throw ConfigError("noisy-or and logistic scoring need boolean variables; '" + v.name +
                          "' has " + std::to_string(v.arity()) + " values");
  }
  lattices_.reserve(schema_.size());
  for (std::size_t x = 0; x < schema_.size(); ++x) lattices_.emplace_back(x, schema_, priors_, config_);
  if (uses_model_slot()) set_score_model(*this, score_model_);
}

std::size_t CombinedNetwork::total_nodes() const {
  std::size_t p = 0;
  for (const auto& l : lattices_) p += l.size();
  return p;
}

CombinedNetwork init(DomainSchema schema, ArcPriorMatrix priors, PriorConfig config,
                     local::ModelKind score_model) {
  return CombinedNetwork(std::move(schema), std::move(priors), config, score_model);
}

namespace {

void refresh_score(CombinedNetwork& net, std::size_t x, LatticeNode& node) {
  if (net.uses_model_slot()) local::score_node_with_model(net, x, node.bits, net.score_model());
  net.lattice(x).rescore(node, net.uses_model_slot());
}

}  // namespace

void observe(CombinedNetwork& net, const Example& example) {
  validate_example(net.schema_, example);
  net.log_.push_back(example);
  const auto& vars = net.schema_.variables();
  const std::size_t n = net.log_.size();
  for (std::size_t x = 0; x < net.lattices_.size(); ++x) {
    ParentLattice& lat = net.lattices_[x];
    for (const auto& [bits, cnode] : lat.nodes()) {
      if (cnode.status != NodeStatus::Alive) continue;
      LatticeNode& node = lat.at(bits);
      if (node.synced_through + 1 == n) {
        absorb(node, x, vars, example);
        node.synced_through = n;
        refresh_score(net, x, node);
      } else {
        sync_node(net, x, bits);
      }
    }
    lat.recompute_best();
  }
}

void observe_batch(CombinedNetwork& net, std::span<const Example> examples) {
  for (const auto& ex : examples) validate_example(net.schema(), ex);
  for (const auto& ex : examples) observe(net, ex);
}

void sync_node(CombinedNetwork& net, std::size_t x, ParentBits bits) {
  ParentLattice& lat = net.lattice(x);
  LatticeNode& node = lat.at(bits);
  const auto& log = net.example_log();
  const auto& vars = net.schema().variables();
  const bool stale = node.synced_through < log.size();
  for (std::size_t t = node.synced_through; t < log.size(); ++t) absorb(node, x, vars, log[t]);
  node.synced_through = log.size();
  if (stale || (net.uses_model_slot() && !node.model)) refresh_score(net, x, node);
  if (node.status == NodeStatus::Alive) lat.recompute_best();
}

void set_score_model(CombinedNetwork& net, local::ModelKind kind) {
  if (kind != local::ModelKind::FullTable) {
    for (const auto& v : net.schema_.variables())
      if (v.arity() != 2)
        throw ConfigError("noisy-or and logistic scoring need boolean variables");
  }
  net.score_model_ = kind;
  for (std::size_t x = 0; x < net.lattices_.size(); ++x) {
    ParentLattice& lat = net.lattices_[x];
    for (const auto& [bits, cnode] : lat.nodes()) {
      LatticeNode& node = lat.at(bits);
      if (node.status == NodeStatus::Dead || node.synced_through != net.log_.size()) continue;
      refresh_score(net, x, node);
    }
    lat.recompute_best();
  }
}

bool dead_condition(const LatticeNode& node, std::size_t child_arity, double dead_kappa) {
  const double needed = dead_kappa * static_cast<double>(child_arity) *
                        static_cast<double>(node.counts.num_configs());
  return static_cast<double>(node.counts.total()) >= needed;
}

namespace {

/// Applies the thresholds to one node. Fresh nodes have no previous status,
/// so hysteresis does not keep them Alive or Open.
void apply_thresholds(CombinedNetwork& net, ParentLattice& lat, LatticeNode& node, double best,
                      const Thresholds& t, bool fresh, SearchReport& report) {
  if (node.status == NodeStatus::Dead) return;
  const double rel = node.log_score - best;
  if (rel < t.log_e && dead_condition(node, lat.child_arity(), t.kappa)) {
    node.status = NodeStatus::Dead;
    node.expansion = Expansion::Closed;
    ++report.nodes_killed;
    ++net.counters().nodes_killed;
    return;
  }
  const bool was_alive = !fresh && node.status == NodeStatus::Alive;
  if (rel >= t.log_c || (was_alive && rel >= t.log_c + t.log_h))
    node.status = NodeStatus::Alive;
  else
    node.status = NodeStatus::Asleep;

  const bool was_open = !fresh && node.expansion == Expansion::Open;
  if (!node.expanded && (rel >= t.log_d || (was_open && rel >= t.log_d + t.log_h)))
    node.expansion = Expansion::Open;
  else
    node.expansion = Expansion::Closed;
}

double best_non_dead(const ParentLattice& lat) {
  double best = kNegInf;
  for (const auto& [bits, node] : lat.nodes())
    if (node.status != NodeStatus::Dead) best = std::max(best, node.log_score);
  return best;
}

/// Syncs every non-dead node, then thresholds against the best of them.
double prepare(CombinedNetwork& net, std::size_t x, const Thresholds& t, SearchReport& report) {
  ParentLattice& lat = net.lattice(x);
  std::vector<ParentBits> keys;
  for (const auto& [bits, node] : lat.nodes())
    if (node.status != NodeStatus::Dead) keys.push_back(bits);
  for (ParentBits b : keys) sync_node(net, x, b);
  const double best = best_non_dead(lat);
  for (ParentBits b : keys) apply_thresholds(net, lat, lat.at(b), best, t, false, report);
  lat.recompute_best();
  return best;
}

std::set<QueueKey> open_queue(const ParentLattice& lat) {
  std::set<QueueKey> q;
  for (const auto& [bits, node] : lat.nodes())
    if (node.status != NodeStatus::Dead && node.expansion == Expansion::Open)
      q.insert({node.log_score, bits});
  return q;
}

}  // namespace

void rethreshold(CombinedNetwork& net, const SearchParams& params) {
  params.validate();
  const Thresholds t(params);
  SearchReport scratch;
  for (std::size_t x = 0; x < net.size(); ++x) prepare(net, x, t, scratch);
}

SearchReport refine(CombinedNetwork& net, const SearchParams& params) {
  params.validate();
  SearchReport report;
  const Thresholds t(params);
  const auto budget_left = [&] { return !params.budget || report.expansions < *params.budget; };

  if (params.budget && *params.budget == 0) {
    for (const auto& lat : net.lattices()) report.best_log_scores.push_back(lat.best_log_score());
    return report;
  }

  bool stopped = false;
  for (std::size_t x = 0; x < net.size() && !stopped; ++x) {
    ParentLattice& lat = net.lattice(x);
    double best = prepare(net, x, t, report);
    auto queue = open_queue(lat);

    while (!queue.empty()) {
      if (!budget_left()) {
        stopped = true;
        break;
      }
      const QueueKey top = *queue.begin();
      queue.erase(queue.begin());
      LatticeNode& node = lat.at(top.bits);
      if (node.status == NodeStatus::Dead) {
        ++net.counters().dead_violations;
        continue;
      }
      if (node.expanded) continue;
      const double rel = node.log_score - best;
      if (rel < t.log_e && dead_condition(node, lat.child_arity(), t.kappa)) {
        apply_thresholds(net, lat, node, best, t, false, report);
        continue;
      }
      if (rel < t.log_d) {
        node.expansion = Expansion::Closed;
        continue;
      }

      node.expanded = true;
      node.expansion = Expansion::Closed;
      ++report.expansions;
      ++net.counters().expansions;

      std::vector<ParentBits> fresh;
      double child_best = kNegInf;
      for (ParentBits c : lat.children_of(top.bits)) {
        if (const LatticeNode* existing = lat.find(c)) {
          if (existing->status != NodeStatus::Dead) child_best = std::max(child_best, existing->log_score);
          continue;
        }
        const auto idx = lat.indexer_of(c);
        lat.insert_node(c, CountTable(lat.child_arity(), idx.num_configs()), 0.0, 0,
                        NodeStatus::Asleep);
        sync_node(net, x, c);
        fresh.push_back(c);
        ++report.nodes_created;
        ++net.counters().nodes_created;
        child_best = std::max(child_best, lat.at(c).log_score);
      }

      if (child_best > best) {
        best = child_best;
        std::vector<ParentBits> keys;
        for (const auto& [bits, n] : lat.nodes()) keys.push_back(bits);
        for (ParentBits b : keys) {
          const bool is_fresh = std::find(fresh.begin(), fresh.end(), b) != fresh.end();
          apply_thresholds(net, lat, lat.at(b), best, t, is_fresh, report);
        }
        queue = open_queue(lat);
      } else {
        for (ParentBits c : fresh) {
          LatticeNode& child = lat.at(c);
          apply_thresholds(net, lat, child, best, t, true, report);
          if (child.status != NodeStatus::Dead && child.expansion == Expansion::Open)
            queue.insert({child.log_score, c});
        }
      }
      lat.recompute_best();
    }
    lat.recompute_best();
  }

  report.exhausted = !stopped;
  for (const auto& lat : net.lattices()) report.best_log_scores.push_back(lat.best_log_score());
  return report;
}

ConcreteNetwork best_network(const CombinedNetwork& net) {
  std::vector<std::vector<std::size_t>> parents;
  std::vector<Cpt> cpts;
  for (const auto& lat : net.lattices()) {
    const LatticeNode* best = nullptr;
    for (const auto& [bits, node] : lat.nodes()) {
      if (node.status != NodeStatus::Alive) continue;
      if (!best || node.log_score > best->log_score) best = &node;
    }
    if (!best) throw StateError("lattice has no Alive node");
    parents.push_back(best->parents);
    cpts.push_back(expected_theta(best->counts, best->alpha_x));
  }
  return ConcreteNetwork(net.schema(), std::move(parents), std::move(cpts));
}

}  // namespace bnrefine
