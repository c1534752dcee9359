#include "bnrefine/math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bnrefine/error.hpp"

namespace bnrefine {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_gamma(double z) {
  if (!(z > 0.0)) throw DomainError("log_gamma requires z > 0");
  return std::lgamma(z);
}

double log_beta_multi(std::span<const double> n) {
  double sum = 0.0;
  double acc = 0.0;
  for (double v : n) {
    acc += log_gamma(v);
    sum += v;
  }
  if (n.empty()) throw DomainError("log_beta_multi of an empty vector");
  return acc - log_gamma(sum);
}

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) return kNegInf;
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double alpha_for(std::size_t x, std::span<const std::size_t> parents, const PriorConfig& config,
                 const DomainSchema& schema) {
  double configs = 1.0;
  for (std::size_t y : parents) {
    if (y >= x) throw DomainError("parent does not precede child in the ordering");
    configs *= static_cast<double>(schema.arity(y));
  }
  return config.alpha / (static_cast<double>(schema.arity(x)) * configs);
}

double log_marginal_likelihood(const CountTable& counts, double alpha_x) {
  if (!(alpha_x > 0.0)) throw DomainError("alpha_x must be positive");
  const auto m = static_cast<double>(counts.child_arity());
  // ln Beta(α,…,α) terms are shared by every row.
  const double lg_alpha = std::lgamma(alpha_x);
  const double lg_m_alpha = std::lgamma(m * alpha_x);
  double total = 0.0;
  for (const auto& [j, row] : counts.rows()) {
    double r = lg_m_alpha - std::lgamma(static_cast<double>(row.total) + m * alpha_x);
    for (auto c : row.counts) {
      if (c != 0) r += std::lgamma(static_cast<double>(c) + alpha_x) - lg_alpha;
    }
    total += r;
  }
  return total;
}

double log_marginal_likelihood(std::size_t x, std::span<const std::size_t> parents,
                               const CountTable& counts, double alpha_x,
                               const DomainSchema& schema) {
  if (counts.child_arity() != schema.arity(x))
    throw StructuralError("count table arity does not match variable");
  ConfigIndex configs = 1;
  for (std::size_t y : parents) configs *= schema.arity(y);
  if (counts.num_configs() != configs)
    throw StructuralError("count table does not match parent set");
  return log_marginal_likelihood(counts, alpha_x);
}

double log_structure_prior(std::size_t x, std::span<const std::size_t> parents,
                           const ArcPriorMatrix& priors, const DomainSchema& schema) {
  if (x >= schema.size()) throw DomainError("variable out of range");
  std::vector<bool> in(x, false);
  for (std::size_t y : parents) {
    if (y >= x) throw DomainError("parent does not precede child in the ordering");
    in[y] = true;
  }
  double lp = 0.0;
  for (std::size_t y = 0; y < x; ++y) {
    const double p = priors.prior(y, x);
    const double f = in[y] ? p : 1.0 - p;
    if (f <= 0.0) return kNegInf;
    lp += in[y] ? std::log(p) : std::log1p(-p);
  }
  return lp;
}

std::vector<double> expected_row(const CountTable& counts, ConfigIndex j, double alpha_x) {
  const std::size_t m = counts.child_arity();
  std::vector<double> out(m, 1.0 / static_cast<double>(m));
  if (const auto* row = counts.row(j)) {
    const double denom = static_cast<double>(row->total) + static_cast<double>(m) * alpha_x;
    for (std::size_t i = 0; i < m; ++i)
      out[i] = (static_cast<double>(row->counts[i]) + alpha_x) / denom;
  }
  return out;
}

Cpt expected_theta(const CountTable& counts, double alpha_x) {
  if (!(alpha_x > 0.0)) throw DomainError("alpha_x must be positive");
  if (counts.num_configs() > (ConfigIndex{1} << 26))
    throw StructuralError("table too large to materialise");
  Cpt cpt;
  cpt.arity = counts.child_arity();
  cpt.num_configs = static_cast<std::size_t>(counts.num_configs());
  cpt.probs.assign(cpt.arity * cpt.num_configs, 1.0 / static_cast<double>(cpt.arity));
  for (const auto& [j, row] : counts.rows()) {
    auto r = expected_row(counts, j, alpha_x);
    std::copy(r.begin(), r.end(), cpt.row(static_cast<std::size_t>(j)).begin());
  }
  return cpt;
}

}  // namespace bnrefine
