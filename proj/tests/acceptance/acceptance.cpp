// Acceptance runner: one PASS/FAIL line per acceptance criterion.
#include <bnrefine/engine.hpp>
#include <bnrefine/error.hpp>
#include <bnrefine/io.hpp>
#include <bnrefine/local_models.hpp>
#include <bnrefine/math.hpp>
#include <bnrefine/oracle.hpp>
#include <bnrefine/query.hpp>
#include <bnrefine/random.hpp>
#include <bnrefine/sampler.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"

using namespace bnrefine;

namespace {

constexpr std::uint64_t kOracleSeed = 20240501;
constexpr std::uint64_t kRecoverySeed = 7;

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Watches every node of every run it is shown. A node seen Dead must stay
/// Dead and Closed, and must not gain children afterwards.
class DeadAudit {
 public:
  void record(const std::string& run, const CombinedNetwork& net) {
    if (net.counters().dead_violations != 0) note(run + ": engine popped a Dead node");
    for (std::size_t x = 0; x < net.size(); ++x) {
      for (const auto& [bits, node] : net.lattice(x).nodes()) {
        const auto key = std::make_tuple(run, x, bits);
        auto it = dead_.find(key);
        if (it != dead_.end()) {
          if (node.status != NodeStatus::Dead) note(run + ": Dead node revived");
          if (node.expansion == Expansion::Open) note(run + ": Dead node reopened");
          if (node.expanded != it->second) note(run + ": Dead node expanded");
        } else if (node.status == NodeStatus::Dead) {
          dead_.emplace(key, node.expanded);
        }
      }
    }
    ++snapshots_;
  }
  std::size_t dead_seen() const { return dead_.size(); }
  std::size_t snapshots() const { return snapshots_; }
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  void note(const std::string& s) {
    if (problems_.size() < 5) problems_.push_back(s);
  }
  std::map<std::tuple<std::string, std::size_t, ParentBits>, bool> dead_;
  std::vector<std::string> problems_;
  std::size_t snapshots_ = 0;
};

DeadAudit audit;

CombinedNetwork oracle_setup(std::vector<Example>* data_out = nullptr) {
  const auto truth = fixtures::five_variable_truth();
  auto data = forward_sample(truth, 500, kOracleSeed);
  auto net = init(truth.schema(), ArcPriorMatrix(5, 0.5), PriorConfig{1.0});
  observe_batch(net, data);
  if (data_out) *data_out = std::move(data);
  return net;
}

Outcome oracle_equivalence() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Example> data;
  auto net = oracle_setup(&data);
  refine(net, fixtures::permissive_params());
  audit.record("oracle", net);
  double worst = 0.0;
  std::size_t required = 0;
  for (std::size_t x = 0; x < net.size(); ++x) {
    const auto& lat = net.lattice(x);
    const auto exact = oracle::exhaustive_posterior(x, data, net.priors(), net.config(), net.schema());
    const double cutoff = exact.max_log_score() + std::log(1e-3);
    for (const auto& e : exact.entries) {
      if (e.log_score < cutoff) continue;
      ++required;
      ParentBits bits = 0;
      for (std::size_t p : e.parents) bits |= ParentBits{1} << *lat.candidate_slot(p);
      const auto* node = lat.find(bits);
      if (!node || node->status != NodeStatus::Alive) out.fail("a high-posterior subset is not Alive");
    }
    for (const auto& [bits, node] : lat.nodes()) {
      const auto* e = exact.find(node.parents);
      if (!e) {
        out.fail("stored node missing from the enumeration");
        continue;
      }
      worst = std::max(worst, std::abs(node.log_score - e->log_score));
    }
  }
  const double secs = seconds_since(t0);
  if (worst > 1e-9) out.fail(fmt("max score gap %.3g", worst));
  if (secs >= 30.0) out.fail(fmt("took %.1f s", secs));
  if (out.pass)
    out.detail = std::to_string(required) + " required subsets Alive, max score gap " +
                 fmt("%.2g", worst) + ", " + fmt("%.2f s", secs);
  return out;
}

Outcome incremental_equals_batch() {
  Outcome out;
  const auto truth = fixtures::five_variable_truth();
  const auto data = forward_sample(truth, 1000, kOracleSeed + 1);

  // Start both arms from the fully expanded lattice so every node is tracked.
  auto base = init(truth.schema(), ArcPriorMatrix(5, 0.5), PriorConfig{1.0});
  refine(base, fixtures::permissive_params());
  auto streamed = base;
  auto batched = base;

  // Mid-stream re-thresholding puts nodes to sleep, so the streamed arm also
  // exercises lazy catch-up.
  SearchParams squeeze;
  squeeze.dead_kappa = 1e12;
  for (std::size_t t = 0; t < data.size(); ++t) {
    observe(streamed, data[t]);
    if ((t + 1) % 100 == 0) {
      rethreshold(streamed, squeeze);
      audit.record("stream", streamed);
    }
  }
  observe_batch(batched, data);

  SearchParams settle = fixtures::permissive_params();
  settle.hysteresis = 1.0;
  settle.dead_kappa = 1e12;
  rethreshold(streamed, settle);
  rethreshold(batched, settle);
  audit.record("stream", streamed);
  audit.record("batch", batched);

  double worst_ml = 0.0;
  std::size_t compared = 0;
  for (std::size_t x = 0; x < truth.size(); ++x) {
    for (const auto& [bits, a] : streamed.lattice(x).nodes()) {
      const auto* b = batched.lattice(x).find(bits);
      if (!b) {
        out.fail("node sets differ");
        continue;
      }
      const auto ref = fixtures::batch_score(streamed, x, a);
      if (a.counts != b->counts || a.counts != ref.counts) out.fail("count tables differ");
      worst_ml = std::max({worst_ml, std::abs(a.log_ml - b->log_ml), std::abs(a.log_ml - ref.log_ml)});
      ++compared;
    }
  }
  const auto pa = all_arc_posteriors(streamed), pb = all_arc_posteriors(batched);
  double worst_arc = 0.0;
  for (const auto& [key, p] : pa.entries) worst_arc = std::max(worst_arc, std::abs(p - pb.at(key.first, key.second)));
  if (worst_ml > 1e-9) out.fail(fmt("log_ml gap %.3g", worst_ml));
  if (worst_arc > 1e-10) out.fail(fmt("arc posterior gap %.3g", worst_arc));
  if (out.pass)
    out.detail = std::to_string(compared) + " nodes, max log_ml gap " + fmt("%.2g", worst_ml) +
                 ", max arc gap " + fmt("%.2g", worst_arc);
  return out;
}

double family_score(const std::vector<Example>& data, const DomainSchema& schema, std::size_t x,
                    std::vector<std::size_t> parents) {
  ParentIndexer idx(parents, schema.arities());
  return log_marginal_likelihood(tally(x, idx, schema, data),
                                 alpha_for(x, idx.parents(), PriorConfig{1.0}, schema));
}

/// Columns of `data` rearranged so that new column k holds old column order[k].
std::vector<Example> reorder(const std::vector<Example>& data, const std::vector<std::size_t>& order) {
  std::vector<Example> out;
  for (const auto& e : data) {
    Example r;
    for (std::size_t k : order) r.values.push_back(e[k]);
    out.push_back(std::move(r));
  }
  return out;
}

Outcome prior_equivalence() {
  Outcome out;
  Rng rng(99);
  const auto two = DomainSchema::binary(2);
  const auto three = DomainSchema::binary(3);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    // Random joint count table, expanded into examples.
    std::vector<Example> data;
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b)
        for (std::uint64_t k = rng.next() % 60; k > 0; --k) data.push_back({{a, b}});
    const double forward = family_score(data, two, 0, {}) + family_score(data, two, 1, {0});
    const auto swapped = reorder(data, {1, 0});
    const double backward = family_score(swapped, two, 0, {}) + family_score(swapped, two, 1, {0});
    worst = std::max(worst, std::abs(forward - backward));

    std::vector<Example> chain;
    for (std::size_t c = 0; c < 8; ++c)
      for (std::uint64_t k = rng.next() % 30; k > 0; --k) chain.push_back({{c >> 2 & 1, c >> 1 & 1, c & 1}});
    // a→b→c, c→b→a and a←b→c, each scored in its own ordering.
    const auto abc = chain;
    const auto cba = reorder(chain, {2, 1, 0});
    const auto bac = reorder(chain, {1, 0, 2});
    const double s1 = family_score(abc, three, 0, {}) + family_score(abc, three, 1, {0}) +
                      family_score(abc, three, 2, {1});
    const double s2 = family_score(cba, three, 0, {}) + family_score(cba, three, 1, {0}) +
                      family_score(cba, three, 2, {1});
    const double s3 = family_score(bac, three, 0, {}) + family_score(bac, three, 1, {0}) +
                      family_score(bac, three, 2, {0});
    worst = std::max({worst, std::abs(s1 - s2), std::abs(s1 - s3)});
  }
  if (worst > 1e-10) out.fail(fmt("max gap %.3g", worst));
  if (out.pass) out.detail = "20 tables, max gap " + fmt("%.2g", worst);
  return out;
}

Outcome structure_recovery() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const auto truth = fixtures::recovery_truth();
  const auto data = forward_sample(truth, 5000, kRecoverySeed);
  auto net = init(truth.schema(), ArcPriorMatrix(truth.size(), 0.5), PriorConfig{1.0});
  observe_batch(net, data);
  refine(net, SearchParams{});
  audit.record("recovery", net);
  const auto arcs = all_arc_posteriors(net);
  double min_true = 1.0, max_false = 0.0;
  for (const auto& [key, p] : arcs.entries) {
    const auto& parents = truth.parents(key.second);
    const bool real = std::find(parents.begin(), parents.end(), key.first) != parents.end();
    if (real) {
      min_true = std::min(min_true, p);
      if (p <= 0.95) out.fail("arc v" + std::to_string(key.first) + "->v" + std::to_string(key.second) + fmt(" at %.4f", p));
    } else {
      max_false = std::max(max_false, p);
      if (p >= 0.05) out.fail("spurious v" + std::to_string(key.first) + "->v" + std::to_string(key.second) + fmt(" at %.4f", p));
    }
  }
  const double secs = seconds_since(t0);
  if (secs >= 60.0) out.fail(fmt("took %.1f s", secs));
  if (out.pass)
    out.detail = "min true arc " + fmt("%.4f", min_true) + ", max absent arc " + fmt("%.4f", max_false) +
                 ", " + fmt("%.2f s", secs);
  return out;
}

std::string resumed_run(std::size_t budget, bool through_disk) {
  auto net = oracle_setup();
  SearchParams p = fixtures::permissive_params();
  p.budget = budget;
  refine(net, p);
  const std::string name = (through_disk ? "resume-disk-" : "resume-") + std::to_string(budget);
  audit.record(name, net);
  if (through_disk) {
    const auto path = std::filesystem::temp_directory_path() / "bnrefine_acceptance_session.json";
    io::save_session(path, net);
    net = io::load_session(path);
    std::filesystem::remove(path);
  }
  p.budget.reset();
  refine(net, p);
  audit.record(name, net);
  return io::session_to_json(net);
}

struct Reference {
  std::string session;
  std::uint64_t expansions = 0;
};

Reference single_run() {
  auto net = oracle_setup();
  refine(net, fixtures::permissive_params());
  audit.record("single", net);
  return {io::session_to_json(net), net.counters().expansions};
}

// The literal budget of 50 can exceed the whole search, so every earlier
// pause point is replayed as well.
Outcome resumable_search(const Reference& ref) {
  Outcome out;
  if (resumed_run(50, false) != ref.session) out.fail("budget 50 run differs from the single run");
  for (std::uint64_t b = 1; b < ref.expansions; ++b)
    if (resumed_run(b, false) != ref.session) out.fail("pause after " + std::to_string(b) + " expansions differs");
  if (out.pass)
    out.detail = "budget 50 and every pause point 1.." + std::to_string(ref.expansions - 1) + " of " +
                 std::to_string(ref.expansions) + " expansions match byte for byte";
  return out;
}

/// Adds examples one at a time to push the {a} node of x's lattice across
/// the admission boundary, measuring with batch scores.
struct Flipper {
  const DomainSchema schema = DomainSchema::binary(2);
  const ArcPriorMatrix priors{2, 0.5};
  std::vector<Example> seen;

  double rel() const {
    const std::vector<std::size_t> none, a{0};
    const double with = family_score(seen, schema, 1, a) + log_structure_prior(1, a, priors, schema);
    const double without = family_score(seen, schema, 1, none) + log_structure_prior(1, none, priors, schema);
    return with - without;
  }

  std::vector<Example> batch(bool up, double boundary) {
    std::vector<Example> out;
    const double margin = 0.02;
    for (int k = 0; k < 10000; ++k) {
      const double r = rel();
      if (up ? r >= boundary + margin : r < boundary - margin) break;
      const std::size_t a = k & 1;
      Example e{{a, up ? a : 1 - a}};
      seen.push_back(e);
      out.push_back(e);
    }
    return out;
  }
};

Outcome hysteresis() {
  Outcome out;
  int changes[2] = {0, 0};
  const double hs[2] = {0.5, 1.0};
  for (int run = 0; run < 2; ++run) {
    SearchParams p;
    p.hysteresis = hs[run];
    const double boundary = std::log(p.c_alive);
    Flipper flip;
    auto net = init(flip.schema, flip.priors, PriorConfig{1.0});
    std::vector<Example> base;
    for (int k = 0; k < 200; ++k) base.push_back({{static_cast<std::size_t>(k & 1), static_cast<std::size_t>(k >> 1 & 1)}});
    flip.seen = base;
    observe_batch(net, base);
    // start below the boundary
    observe_batch(net, flip.batch(false, boundary));
    refine(net, p);
    const std::string name = "hysteresis-" + std::to_string(run);
    audit.record(name, net);
    if (!net.lattice(1).contains(1)) {
      out.fail("{a} was never generated");
      return out;
    }
    NodeStatus last = net.lattice(1).at(1).status;
    for (int b = 0; b < 20; ++b) {
      const auto mini = flip.batch(b % 2 == 0, boundary);
      observe_batch(net, mini);
      refine(net, p);
      audit.record(name, net);
      const NodeStatus now = net.lattice(1).at(1).status;
      changes[run] += now != last;
      last = now;
    }
  }
  if (changes[0] > 2) out.fail("hysteresis 0.5 changed status " + std::to_string(changes[0]) + " times");
  if (changes[1] < 10) out.fail("hysteresis 1 changed status only " + std::to_string(changes[1]) + " times");
  if (out.pass)
    out.detail = "status changes: " + std::to_string(changes[0]) + " with 0.5, " + std::to_string(changes[1]) +
                 " with 1";
  return out;
}

Outcome smoothed_networks() {
  Outcome out;
  const auto truth = fixtures::five_variable_truth();
  auto net = init(truth.schema(), ArcPriorMatrix(5, 0.5), PriorConfig{1.0});
  observe_batch(net, forward_sample(truth, 60, kOracleSeed + 2));
  SearchParams p;
  p.c_alive = 0.02;
  p.d_open = 0.002;
  p.e_dead = 2e-5;
  refine(net, p);

  double worst_sum = 0.0, worst_hull = 0.0;
  std::size_t multi_leaf = 0;
  for (std::size_t x = 0; x < net.size(); ++x) {
    const auto& lat = net.lattice(x);
    const auto masses = leaf_masses(lat);
    multi_leaf += masses.size() > 1;
    for (const auto& lm : masses) {
      const auto fam = smooth_family(lat, lm.leaf);
      const auto leaf_idx = lat.indexer_of(lm.leaf);
      for (std::size_t j = 0; j < fam.cpt.num_configs; ++j) {
        double s = 0.0;
        const auto values = leaf_idx.decode(j);
        for (std::size_t i = 0; i < fam.cpt.arity; ++i) {
          const double v = fam.cpt.at(j, i);
          s += v;
          double lo = 1.0, hi = 0.0;
          for (ParentBits sub : lm.subsets) {
            const auto& node = lat.at(sub);
            std::vector<std::size_t> proj;
            for (std::size_t q : node.parents)
              proj.push_back(values[std::find(fam.parents.begin(), fam.parents.end(), q) - fam.parents.begin()]);
            const double e = expected_row(node.counts, lat.indexer_of(sub).index(proj), node.alpha_x)[i];
            lo = std::min(lo, e);
            hi = std::max(hi, e);
          }
          worst_hull = std::max({worst_hull, lo - v, v - hi});
        }
        worst_sum = std::max(worst_sum, std::abs(s - 1.0));
      }
    }
  }
  if (worst_sum > 1e-12) out.fail(fmt("row sum off by %.3g", worst_sum));
  if (worst_hull > 1e-15) out.fail(fmt("entry outside hull by %.3g", worst_hull));
  if (multi_leaf == 0) out.fail("no lattice had more than one leaf");

  constexpr std::size_t kDraws = 100000;
  std::vector<std::map<ParentBits, std::size_t>> hits(net.size());
  for (std::uint64_t seed = 0; seed < kDraws; ++seed) {
    const auto s = sample_smoothed(net, seed);
    for (std::size_t x = 0; x < net.size(); ++x) ++hits[x][s.families[x].leaf];
  }
  double worst_z = 0.0;
  for (std::size_t x = 0; x < net.size(); ++x) {
    const auto masses = leaf_masses(net.lattice(x));
    double total = 0.0;
    for (const auto& lm : masses) total += lm.mass;
    for (const auto& lm : masses) {
      const double q = lm.mass / total;
      const double freq = static_cast<double>(hits[x][lm.leaf]) / kDraws;
      const double se = std::sqrt(q * (1.0 - q) / kDraws);
      if (se > 0) worst_z = std::max(worst_z, std::abs(freq - q) / se);
    }
  }
  if (worst_z > 3.0) out.fail(fmt("leaf frequency %.2f standard errors off", worst_z));
  if (out.pass)
    out.detail = std::to_string(multi_leaf) + " multi-leaf lattices, row sum err " + fmt("%.2g", worst_sum) +
                 ", worst leaf z " + fmt("%.2f", worst_z);
  return out;
}

local::BinaryFamilyData noisyor_rows(const std::vector<double>& q, std::size_t rows, std::uint64_t seed) {
  Rng rng(seed);
  local::BinaryFamilyData d;
  d.num_parents = q.size() - 1;
  std::vector<std::uint8_t> parents(d.num_parents);
  for (std::size_t r = 0; r < rows; ++r) {
    double prod = q[0];
    for (std::size_t i = 0; i < d.num_parents; ++i) {
      parents[i] = rng.uniform() < 0.5;
      if (parents[i]) prod *= q[i + 1];
    }
    d.add_row(rng.uniform() >= prod, parents);
  }
  return d;
}

Outcome local_models() {
  Outcome out;
  using local::ModelKind;
  Rng rng(123);

  const auto grad_data = local::PatternCounts::from_rows(noisyor_rows({0.6, 0.3, 0.4, 0.8}, 1000, 5));
  double worst_grad = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> u(4);
    for (auto& v : u) v = -3.0 + 6.0 * rng.uniform();
    for (int which = 0; which < 2; ++which) {
      auto f = [&](std::span<const double> c, std::span<double> g) {
        return which == 0 ? local::noisyor_loglik(c, grad_data, g) : local::logistic_loglik(c, grad_data, g);
      };
      std::vector<double> g(4);
      f(u, g);
      double diff = 0.0, scale = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        auto up = u, dn = u;
        up[k] += 1e-5;
        dn[k] -= 1e-5;
        const double fd = (f(up, {}) - f(dn, {})) / 2e-5;
        diff += (g[k] - fd) * (g[k] - fd);
        scale += g[k] * g[k];
      }
      worst_grad = std::max(worst_grad, std::sqrt(diff) / std::max(1.0, std::sqrt(scale)));
    }
  }
  if (worst_grad > 1e-6) out.fail(fmt("gradient relative error %.3g", worst_grad));

  const std::vector<double> q{0.85, 0.3, 0.5, 0.15};
  const auto fit = local::fit_map(ModelKind::NoisyOr, local::PatternCounts::from_rows(noisyor_rows(q, 10000, 6)),
                                  local::LocalPrior{});
  const auto est = local::noisyor_from_coords(fit.coords);
  double worst_q = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) worst_q = std::max(worst_q, std::abs(est.q[k] - q[k]));
  if (worst_q > 0.05) out.fail(fmt("noisy-or recovery error %.3g", worst_q));

  const auto one = local::PatternCounts::from_rows(noisyor_rows({0.35}, 100, 7));
  const local::LocalPrior prior;
  const double laplace = local::laplace_log_marginal(ModelKind::NoisyOr, one, prior);
  const double quad = oracle::quadrature_marginal_1d(
      [&](double u) { return local::noisyor_loglik(std::vector<double>{u}, one); },
      [&](double u) {
        return -0.5 * std::log(2 * std::numbers::pi * prior.scale * prior.scale) - u * u / (2 * prior.scale * prior.scale);
      },
      oracle::Grid{});
  if (std::abs(laplace - quad) > 0.5) out.fail(fmt("Laplace off quadrature by %.3g nats", std::abs(laplace - quad)));

  double worst_small = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> qs{1e-4 + 9e-4 * rng.uniform(), 0.1 + 0.8 * rng.uniform(), 0.1 + 0.8 * rng.uniform()};
    std::vector<double> tau;
    for (double v : qs) tau.push_back(std::log(v));
    local::BinaryFamilyData row;
    row.num_parents = 2;
    const std::vector<std::uint8_t> pv{static_cast<std::uint8_t>(rng.next() & 1), static_cast<std::uint8_t>(rng.next() & 1)};
    row.add_row(rng.next() & 1, pv);
    worst_small = std::max(worst_small, std::abs(local::noisyor_loglik(local::NoisyOrParams{qs}, row) -
                                                 local::logistic_loglik(local::LogisticParams{tau}, row)));
  }
  if (worst_small > 1e-2) out.fail(fmt("small-product gap %.3g", worst_small));

  if (out.pass)
    out.detail = "grad err " + fmt("%.2g", worst_grad) + ", q err " + fmt("%.3f", worst_q) + ", Laplace-quad " +
                 fmt("%.3f", std::abs(laplace - quad)) + " nats, small-product gap " + fmt("%.2g", worst_small);
  return out;
}

Outcome persistence(const Reference& ref) {
  Outcome out;
  if (resumed_run(50, true) != ref.session) out.fail("budget 50 run across save/load differs");
  for (std::uint64_t b = 1; b < ref.expansions; ++b)
    if (resumed_run(b, true) != ref.session) out.fail("save/load after " + std::to_string(b) + " expansions differs");

  // Mid-stream: half the data, save/load, the rest, then search.
  const auto truth = fixtures::five_variable_truth();
  const auto data = forward_sample(truth, 500, kOracleSeed);
  auto a = init(truth.schema(), ArcPriorMatrix(5, 0.5), PriorConfig{1.0});
  auto b = a;
  const auto half = std::span<const Example>(data).first(250), rest = std::span<const Example>(data).subspan(250);
  SearchParams p;
  observe_batch(a, half);
  observe_batch(b, half);
  refine(a, p);
  refine(b, p);
  b = io::session_from_json(io::session_to_json(b));
  observe_batch(a, rest);
  observe_batch(b, rest);
  refine(a, p);
  refine(b, p);
  if (io::session_to_json(a) != io::session_to_json(b)) out.fail("mid-stream save/load changed later behaviour");
  if (all_arc_posteriors(a) != all_arc_posteriors(b)) out.fail("arc posteriors differ after reload");
  if (out.pass)
    out.detail = "reload at budget 50, at every pause point 1.." + std::to_string(ref.expansions - 1) +
                 " and mid-stream all match the uninterrupted runs";
  return out;
}

Outcome dead_node_safety() {
  Outcome out;
  for (const auto& p : audit.problems()) out.fail(p);
  if (audit.dead_seen() == 0) out.fail("no Dead node was observed, so the audit proved nothing");
  if (out.pass)
    out.detail = std::to_string(audit.dead_seen()) + " Dead nodes tracked over " + std::to_string(audit.snapshots()) +
                 " snapshots, zero violations";
  return out;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    std::function<Outcome()> run;
  };
  Reference reference;
  const std::vector<Entry> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"incremental equals batch", incremental_equals_batch},
      {"equivalent structures score equally", prior_equivalence},
      {"structure recovery", structure_recovery},
      {"resumable any-time search",
       [&] {
         reference = single_run();
         return resumable_search(reference);
       }},
      {"hysteresis", hysteresis},
      {"smoothed networks", smoothed_networks},
      {"local models", local_models},
      {"persistence", [&] { return persistence(reference); }},
      {"dead-node safety", dead_node_safety},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failures += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
