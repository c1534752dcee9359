#include "bnrefine/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "bnrefine/error.hpp"

namespace bnrefine::oracle {

namespace {

double lse(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Dirichlet-multinomial marginal from a dense count matrix, one Gamma
// evaluation per cell.
double dense_log_ml(const std::vector<std::vector<double>>& counts, double a) {
  double total = 0.0;
  for (const auto& row : counts) {
    double n = 0.0;
    double r = 0.0;
    for (double c : row) {
      r += std::lgamma(c + a) - std::lgamma(a);
      n += c;
    }
    const double m = static_cast<double>(row.size());
    r += std::lgamma(m * a) - std::lgamma(n + m * a);
    total += r;
  }
  return total;
}

}  // namespace

double ExactPosterior::max_log_score() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& e : entries) m = std::max(m, e.log_score);
  return m;
}

const ExactPosteriorEntry* ExactPosterior::find(std::span<const std::size_t> parents) const {
  std::vector<std::size_t> key(parents.begin(), parents.end());
  std::sort(key.begin(), key.end());
  for (const auto& e : entries)
    if (e.parents == key) return &e;
  return nullptr;
}

ExactPosterior exhaustive_posterior(std::size_t x, std::span<const Example> data,
                                    const ArcPriorMatrix& priors, const PriorConfig& config,
                                    const DomainSchema& schema) {
  if (x >= schema.size()) throw DomainError("variable out of range");
  std::vector<std::size_t> uncertain;
  std::vector<std::size_t> mandatory;
  for (std::size_t y = 0; y < x; ++y) {
    const double p = priors.prior(y, x);
    if (p == 1.0)
      mandatory.push_back(y);
    else if (p > 0.0)
      uncertain.push_back(y);
  }
  if (uncertain.size() > kMaxCandidates)
    throw GuardError("exhaustive posterior refuses more than 15 candidate parents");

  const std::size_t mx = schema.arity(x);
  ExactPosterior out;
  out.variable = x;
  const std::size_t subsets = std::size_t{1} << uncertain.size();
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    std::vector<std::size_t> parents = mandatory;
    double log_prior = 0.0;
    for (std::size_t k = 0; k < uncertain.size(); ++k) {
      const double p = priors.prior(uncertain[k], x);
      if (mask >> k & 1U) {
        parents.push_back(uncertain[k]);
        log_prior += std::log(p);
      } else {
        log_prior += std::log(1.0 - p);
      }
    }
    std::sort(parents.begin(), parents.end());

    // Dense tally keyed by the tuple of parent values.
    std::size_t configs = 1;
    for (std::size_t y : parents) configs *= schema.arity(y);
    std::map<std::vector<std::size_t>, std::vector<double>> rows;
    for (const auto& ex : data) {
      std::vector<std::size_t> key;
      for (std::size_t y : parents) key.push_back(ex[y]);
      auto& row = rows[key];
      if (row.empty()) row.assign(mx, 0.0);
      row[ex[x]] += 1.0;
    }
    std::vector<std::vector<double>> dense;
    for (auto& [k, row] : rows) dense.push_back(row);
    const double a = config.alpha / (static_cast<double>(mx) * static_cast<double>(configs));
    out.entries.push_back({parents, log_prior + dense_log_ml(dense, a), 0.0});
  }
  std::vector<double> scores;
  for (const auto& e : out.entries) scores.push_back(e.log_score);
  const double z = lse(scores);
  for (auto& e : out.entries) e.probability = std::exp(e.log_score - z);
  return out;
}

double exhaustive_arc_posterior(const ExactPosterior& posterior, std::size_t y) {
  double p = 0.0;
  std::size_t containing = 0;
  for (const auto& e : posterior.entries) {
    if (std::find(e.parents.begin(), e.parents.end(), y) == e.parents.end()) continue;
    p += e.probability;
    ++containing;
  }
  if (containing == 0) return 0.0;
  if (containing == posterior.entries.size()) return 1.0;  // hard arc
  return p;
}

double exhaustive_arc_posterior(std::size_t y, std::size_t x, std::span<const Example> data,
                                const ArcPriorMatrix& priors, const PriorConfig& config,
                                const DomainSchema& schema) {
  if (y >= x) throw DomainError("arc posterior needs y before x");
  if (priors.mandatory(y, x)) return 1.0;
  if (priors.forbidden(y, x)) return 0.0;
  return exhaustive_arc_posterior(exhaustive_posterior(x, data, priors, config, schema), y);
}

Example joint_assignment(const DomainSchema& schema, std::size_t index) {
  Example ex;
  ex.values.assign(schema.size(), 0);
  for (std::size_t k = schema.size(); k-- > 0;) {
    ex.values[k] = index % schema.arity(k);
    index /= schema.arity(k);
  }
  return ex;
}

std::vector<double> full_joint_enumeration(const ConcreteNetwork& network) {
  const auto& schema = network.schema();
  std::size_t states = 1;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    states *= schema.arity(i);
    if (states > kMaxJointStates) throw GuardError("joint table larger than 2^20 states");
  }
  std::vector<double> table(states);
  for (std::size_t s = 0; s < states; ++s) {
    const Example ex = joint_assignment(schema, s);
    double p = 1.0;
    for (std::size_t x = 0; x < schema.size(); ++x) {
      // Row lookup by explicit mixed-radix walk over the parent values.
      std::size_t j = 0;
      for (std::size_t y : network.parents(x)) j = j * schema.arity(y) + ex[y];
      p *= network.cpt(x).at(j, ex[x]);
    }
    table[s] = p;
  }
  return table;
}

double quadrature_marginal_1d(const std::function<double(double)>& log_likelihood,
                              const std::function<double(double)>& log_prior_density,
                              const Grid& grid) {
  if (grid.points < 2 || !(grid.hi > grid.lo)) throw DomainError("quadrature grid is empty");
  const double h = (grid.hi - grid.lo) / static_cast<double>(grid.points - 1);
  std::vector<double> logs(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double t = grid.lo + h * static_cast<double>(i);
    logs[i] = log_likelihood(t) + log_prior_density(t);
    if (i == 0 || i + 1 == grid.points) logs[i] += std::log(0.5);
  }
  return lse(logs) + std::log(h);
}

}  // namespace bnrefine::oracle
