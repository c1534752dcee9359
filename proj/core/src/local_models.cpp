#include "bnrefine/local_models.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "bnrefine/engine.hpp"

namespace bnrefine::local {

namespace {

// ln σ(u) = −ln(1 + e^{−u}), evaluated without overflow.
double log_sigmoid(double u) { return u >= 0 ? -std::log1p(std::exp(-u)) : u - std::log1p(std::exp(u)); }

double sigmoid(double u) {
  if (u >= 0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

// ln(1 − e^{l}) for l < 0.
double log1mexp(double l) {
  return l > -std::numbers::ln2 ? std::log(-std::expm1(l)) : std::log1p(-std::exp(l));
}

void require(bool ok, const char* what) {
  if (!ok) throw StructuralError(what);
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::FullTable: return "table";
    case ModelKind::NoisyOr: return "noisy-or";
    case ModelKind::Logistic: return "logistic";
  }
  return "table";
}

ModelKind model_kind_from_string(std::string_view s) {
  if (s == "table") return ModelKind::FullTable;
  if (s == "noisy-or") return ModelKind::NoisyOr;
  if (s == "logistic") return ModelKind::Logistic;
  throw ConfigError("unknown model kind '" + std::string(s) + "'");
}

void BinaryFamilyData::add_row(bool x, std::span<const std::uint8_t> parent_values) {
  require(parent_values.size() == num_parents, "row width does not match parent count");
  child.push_back(x ? 1 : 0);
  parents.insert(parents.end(), parent_values.begin(), parent_values.end());
}

PatternCounts PatternCounts::from_rows(const BinaryFamilyData& data) {
  require(data.parents.size() == data.rows() * data.num_parents, "parent matrix shape mismatch");
  std::map<std::vector<std::size_t>, std::pair<double, double>> grouped;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < data.num_parents; ++i)
      if (data.parents[r * data.num_parents + i]) active.push_back(i);
    auto& cell = grouped[active];
    (data.child[r] ? cell.second : cell.first) += 1.0;
  }
  PatternCounts out;
  out.num_parents = data.num_parents;
  for (auto& [active, c] : grouped) out.patterns.push_back({active, c.first, c.second});
  return out;
}

PatternCounts PatternCounts::from_table(const CountTable& counts, std::size_t num_parents) {
  require(counts.child_arity() == 2, "pattern counts need a boolean child");
  require(num_parents < 64 && counts.num_configs() == (ConfigIndex{1} << num_parents),
          "pattern counts need boolean parents");
  PatternCounts out;
  out.num_parents = num_parents;
  for (const auto& [j, row] : counts.rows()) {
    Pattern p;
    for (std::size_t k = 0; k < num_parents; ++k)
      if ((j >> (num_parents - 1 - k)) & 1U) p.active.push_back(k);
    p.n_false = static_cast<double>(row.counts[0]);
    p.n_true = static_cast<double>(row.counts[1]);
    out.patterns.push_back(std::move(p));
  }
  return out;
}

double PatternCounts::rows() const {
  double n = 0.0;
  for (const auto& p : patterns) n += p.n_false + p.n_true;
  return n;
}

PatternCounts PatternCounts::scaled(double factor) const {
  PatternCounts out = *this;
  for (auto& p : out.patterns) {
    p.n_false *= factor;
    p.n_true *= factor;
  }
  return out;
}

double noisyor_loglik(const NoisyOrParams& params, const BinaryFamilyData& data) {
  require(params.q.size() == data.num_parents + 1, "noisy-or needs n+1 parameters");
  require(data.parents.size() == data.rows() * data.num_parents, "parent matrix shape mismatch");
  double ll = 0.0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    double prod = params.q[0];
    for (std::size_t i = 0; i < data.num_parents; ++i)
      if (data.parents[r * data.num_parents + i]) prod *= params.q[i + 1];
    ll += data.child[r] ? std::log1p(-prod) : std::log(prod);
  }
  return ll;
}

double logistic_loglik(const LogisticParams& params, const BinaryFamilyData& data) {
  require(params.tau.size() == data.num_parents + 1, "logistic needs n+1 parameters");
  require(data.parents.size() == data.rows() * data.num_parents, "parent matrix shape mismatch");
  double ll = 0.0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    double s = params.tau[0];
    for (std::size_t i = 0; i < data.num_parents; ++i)
      if (data.parents[r * data.num_parents + i]) s += params.tau[i + 1];
    ll += data.child[r] ? log_sigmoid(-s) : log_sigmoid(s);
  }
  return ll;
}

namespace {

// Shared evaluator. Adds the log-likelihood terms for each pattern into
// value/grad/neg_hess (neg_hess may be null).
void noisyor_terms(std::span<const double> u, const PatternCounts& data, double& value,
                   double* grad, double* neg_hess) {
  const std::size_t d = u.size();
  std::vector<std::size_t> idx;
  for (const auto& p : data.patterns) {
    idx.assign(1, 0);
    for (std::size_t a : p.active) idx.push_back(a + 1);
    double l = 0.0;
    for (std::size_t k : idx) l += log_sigmoid(u[k]);
    double first = p.n_false;  // d(value)/dL
    if (p.n_false != 0.0) value += p.n_false * l;
    double second = 0.0;  // d²(value)/dL²
    if (p.n_true != 0.0) {
      value += p.n_true * log1mexp(l);
      const double em1 = std::expm1(-l);
      first += -p.n_true / em1;
      second = -p.n_true * std::exp(-l) / (em1 * em1);
    }
    if (!grad) continue;
    for (std::size_t k : idx) grad[k] += first * sigmoid(-u[k]);
    if (!neg_hess) continue;
    for (std::size_t a : idx) {
      const double ga = sigmoid(-u[a]);
      for (std::size_t b : idx) neg_hess[a * d + b] -= second * ga * sigmoid(-u[b]);
      neg_hess[a * d + a] -= first * (-sigmoid(u[a]) * ga);
    }
  }
}

void logistic_terms(std::span<const double> tau, const PatternCounts& data, double& value,
                    double* grad, double* neg_hess) {
  const std::size_t d = tau.size();
  std::vector<std::size_t> idx;
  for (const auto& p : data.patterns) {
    idx.assign(1, 0);
    for (std::size_t a : p.active) idx.push_back(a + 1);
    double s = 0.0;
    for (std::size_t k : idx) s += tau[k];
    value += p.n_false * log_sigmoid(s) + p.n_true * log_sigmoid(-s);
    if (!grad) continue;
    const double g = p.n_false * sigmoid(-s) - p.n_true * sigmoid(s);
    for (std::size_t k : idx) grad[k] += g;
    if (!neg_hess) continue;
    const double h = (p.n_false + p.n_true) * sigmoid(s) * sigmoid(-s);
    for (std::size_t a : idx)
      for (std::size_t b : idx) neg_hess[a * d + b] += h;
  }
}

// Full table in logit coordinates with the Dirichlet prior folded in:
// (n_t + a) ln σ(v) + (n_f + a) ln σ(−v) − ln B(a, a), one coordinate per pattern.
void table_terms(std::span<const double> v, const PatternCounts& data, double alpha_x,
                 double& value, double* grad, double* neg_hess) {
  const std::size_t d = v.size();
  const double log_b = 2.0 * std::lgamma(alpha_x) - std::lgamma(2.0 * alpha_x);
  for (std::size_t k = 0; k < data.patterns.size(); ++k) {
    const auto& p = data.patterns[k];
    const double t = p.n_true + alpha_x;
    const double f = p.n_false + alpha_x;
    value += t * log_sigmoid(v[k]) + f * log_sigmoid(-v[k]) - log_b;
    if (grad) grad[k] += t * sigmoid(-v[k]) - f * sigmoid(v[k]);
    if (neg_hess) neg_hess[k * d + k] += (t + f) * sigmoid(v[k]) * sigmoid(-v[k]);
  }
}

}  // namespace

double noisyor_loglik(std::span<const double> logit_q, const PatternCounts& data,
                      std::span<double> gradient) {
  require(logit_q.size() == data.num_parents + 1, "noisy-or needs n+1 coordinates");
  double value = 0.0;
  if (!gradient.empty()) {
    require(gradient.size() == logit_q.size(), "gradient size mismatch");
    std::fill(gradient.begin(), gradient.end(), 0.0);
  }
  noisyor_terms(logit_q, data, value, gradient.empty() ? nullptr : gradient.data(), nullptr);
  return value;
}

double logistic_loglik(std::span<const double> tau, const PatternCounts& data,
                       std::span<double> gradient) {
  require(tau.size() == data.num_parents + 1, "logistic needs n+1 coordinates");
  double value = 0.0;
  if (!gradient.empty()) {
    require(gradient.size() == tau.size(), "gradient size mismatch");
    std::fill(gradient.begin(), gradient.end(), 0.0);
  }
  logistic_terms(tau, data, value, gradient.empty() ? nullptr : gradient.data(), nullptr);
  return value;
}

std::size_t parameter_count(ModelKind kind, const PatternCounts& data) {
  return kind == ModelKind::FullTable ? data.patterns.size() : data.num_parents + 1;
}

Objective evaluate_objective(ModelKind kind, std::span<const double> coords,
                             const PatternCounts& data, const LocalPrior& prior,
                             bool with_hessian) {
  const std::size_t d = parameter_count(kind, data);
  require(coords.size() == d, "coordinate count does not match the model");
  Objective obj;
  obj.gradient.assign(d, 0.0);
  if (with_hessian) obj.neg_hessian.assign(d * d, 0.0);
  double* h = with_hessian ? obj.neg_hessian.data() : nullptr;

  switch (kind) {
    case ModelKind::NoisyOr: noisyor_terms(coords, data, obj.value, obj.gradient.data(), h); break;
    case ModelKind::Logistic: logistic_terms(coords, data, obj.value, obj.gradient.data(), h); break;
    case ModelKind::FullTable:
      table_terms(coords, data, prior.alpha_x, obj.value, obj.gradient.data(), h);
      return obj;
  }
  const double var = prior.scale * prior.scale;
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * var);
  for (std::size_t k = 0; k < d; ++k) {
    obj.value += log_norm - coords[k] * coords[k] / (2.0 * var);
    obj.gradient[k] -= coords[k] / var;
    if (h) h[k * d + k] += 1.0 / var;
  }
  return obj;
}

namespace {

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

FitResult fit_map(ModelKind kind, const PatternCounts& data, const LocalPrior& prior,
                  std::optional<std::span<const double>> warm_start, const FitOptions& options) {
  if (data.rows() <= 0.0 && kind != ModelKind::FullTable)
    throw DomainError("fit_map needs at least one row");
  const std::size_t d = parameter_count(kind, data);
  FitResult res;
  res.kind = kind;
  res.coords.assign(d, 0.0);
  if (warm_start && warm_start->size() == d)
    std::copy(warm_start->begin(), warm_start->end(), res.coords.begin());

  Objective obj = evaluate_objective(kind, res.coords, data, prior);
  res.log_posterior = obj.value;
  res.objective_trace.push_back(obj.value);
  using Mat = Eigen::MatrixXd;
  using Vec = Eigen::VectorXd;

  for (int it = 0;; ++it) {
    res.gradient_norm = norm(obj.gradient);
    res.iterations = it;
    if (res.gradient_norm < options.gradient_tolerance) return res;
    if (it >= options.max_iterations) break;

    const Mat neg_h = Eigen::Map<const Mat>(obj.neg_hessian.data(), d, d);
    const Vec g = Eigen::Map<const Vec>(obj.gradient.data(), d);
    const double diag_scale = std::max(1.0, neg_h.diagonal().cwiseAbs().maxCoeff());
    double lambda = 0.0;
    Vec step;
    for (int tries = 0; tries < 60; ++tries) {
      Eigen::LLT<Mat> llt(neg_h + lambda * Mat::Identity(d, d));
      if (llt.info() == Eigen::Success) {
        step = llt.solve(g);
        if (step.allFinite()) break;
      }
      lambda = lambda == 0.0 ? 1e-8 * diag_scale : lambda * 10.0;
    }
    if (step.size() == 0) break;

    // Backtracking: accept any non-decreasing objective. Steps whose change
    // is lost in rounding are accepted when they shrink the gradient.
    bool accepted = false;
    double t = 1.0;
    std::vector<double> cand(d);
    for (int ls = 0; ls < 60 && !accepted; ++ls, t *= 0.5) {
      for (std::size_t k = 0; k < d; ++k) cand[k] = res.coords[k] + t * step[static_cast<Eigen::Index>(k)];
      Objective trial = evaluate_objective(kind, cand, data, prior, true);
      if (!std::isfinite(trial.value)) continue;
      const double noise = 1e-13 * (1.0 + std::abs(obj.value));
      if (trial.value > obj.value ||
          (trial.value >= obj.value - noise && norm(trial.gradient) < res.gradient_norm)) {
        res.coords = cand;
        obj = std::move(trial);
        accepted = true;
      }
    }
    if (!accepted) break;
    res.log_posterior = obj.value;
    res.objective_trace.push_back(obj.value);
  }
  res.log_posterior = obj.value;
  res.gradient_norm = norm(obj.gradient);
  throw FitError("MAP fit did not reach gradient norm " + std::to_string(options.gradient_tolerance) +
                     " (at " + std::to_string(res.gradient_norm) + ")",
                 res);
}

double laplace_log_marginal(ModelKind kind, const PatternCounts& data, const LocalPrior& prior,
                            FitResult* fit, std::optional<std::span<const double>> warm_start) {
  FitResult res = fit_map(kind, data, prior, warm_start);
  const std::size_t d = res.coords.size();
  double log_det = 0.0;
  if (d > 0) {
    const Objective obj = evaluate_objective(kind, res.coords, data, prior);
    const Eigen::MatrixXd neg_h =
        Eigen::Map<const Eigen::MatrixXd>(obj.neg_hessian.data(), static_cast<Eigen::Index>(d),
                                          static_cast<Eigen::Index>(d));
    Eigen::LLT<Eigen::MatrixXd> llt(neg_h);
    if (llt.info() != Eigen::Success)
      throw DomainError("negative Hessian at the MAP point is not positive definite");
    const auto& l = llt.matrixLLT();
    for (Eigen::Index k = 0; k < l.rows(); ++k) log_det += 2.0 * std::log(l(k, k));
  }
  const double out = res.log_posterior + 0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi) -
                     0.5 * log_det;
  if (fit) *fit = std::move(res);
  return out;
}

NoisyOrParams noisyor_from_coords(std::span<const double> coords) {
  NoisyOrParams p;
  for (double u : coords) p.q.push_back(sigmoid(u));
  return p;
}

LogisticParams logistic_from_coords(std::span<const double> coords) {
  return LogisticParams{{coords.begin(), coords.end()}};
}

LocalModelScore score_node_with_model(CombinedNetwork& net, std::size_t x, std::uint64_t node_bits,
                                      ModelKind kind) {
  ParentLattice& lat = net.lattice(x);
  LatticeNode& node = lat.at(node_bits);
  LocalModelScore slot;
  slot.kind = kind;
  if (kind == ModelKind::FullTable) {
    slot.log_marginal = node.log_ml;
  } else {
    const auto& schema = net.schema();
    if (schema.arity(x) != 2)
      throw ConfigError("model '" + std::string(to_string(kind)) + "' needs boolean '" +
                        schema.variable(x).name + "'");
    for (std::size_t p : node.parents)
      if (schema.arity(p) != 2)
        throw ConfigError("model '" + std::string(to_string(kind)) + "' needs boolean parent '" +
                          schema.variable(p).name + "'");
    const auto data = PatternCounts::from_table(node.counts, node.parents.size());
    const LocalPrior prior{net.local_prior().scale, node.alpha_x};
    std::optional<std::span<const double>> warm;
    if (node.model && node.model->kind == kind) warm = std::span<const double>(node.model->coords);
    if (data.rows() == 0.0) {
      slot.coords.assign(node.parents.size() + 1, 0.0);
      slot.log_marginal = 0.0;
    } else {
      FitResult fit;
      slot.log_marginal = laplace_log_marginal(kind, data, prior, &fit, warm);
      slot.coords = std::move(fit.coords);
    }
  }
  node.model = slot;
  if (net.score_model() == kind) lat.rescore(node, true);
  return slot;
}

}  // namespace bnrefine::local
