#ifndef BNREFINE_LOCAL_MODELS_HPP
#define BNREFINE_LOCAL_MODELS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bnrefine/counts.hpp"
#include "bnrefine/error.hpp"

namespace bnrefine {

class CombinedNetwork;

/// Restricted conditional distributions for a boolean child with boolean
/// parents. Value index 1 is "true", 0 is "false".
namespace local {

enum class ModelKind : std::uint8_t { FullTable, NoisyOr, Logistic };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view s);

/// Raw rows: `child[r]` and `parents[r * num_parents + i]`, all 0/1.
struct BinaryFamilyData {
  std::size_t num_parents = 0;
  std::vector<std::uint8_t> child;
  std::vector<std::uint8_t> parents;

  std::size_t rows() const noexcept { return child.size(); }
  void add_row(bool x, std::span<const std::uint8_t> parent_values);
};

/// Rows grouped by parent pattern. Both likelihoods depend on the data only
/// through these counts.
struct PatternCounts {
  struct Pattern {
    std::vector<std::size_t> active;  // indices of true parents
    double n_false = 0.0;
    double n_true = 0.0;
  };
  std::size_t num_parents = 0;
  std::vector<Pattern> patterns;

  static PatternCounts from_rows(const BinaryFamilyData& data);
  /// From a boolean family's count table; parent bit k of the configuration
  /// follows the ParentIndexer layout (last parent varies fastest).
  static PatternCounts from_table(const CountTable& counts, std::size_t num_parents);

  double rows() const;
  PatternCounts scaled(double factor) const;
};

/// q_0 is the leak; q_i the probability that a true parent i fails to
/// trigger the child. Pr(x false) = q_0 ∏_{i true} q_i.
struct NoisyOrParams {
  std::vector<double> q;
};

/// Pr(x false) = r/(1+r) with ln r = τ_0 + Σ_{i true} τ_i.
struct LogisticParams {
  std::vector<double> tau;
};

double noisyor_loglik(const NoisyOrParams& params, const BinaryFamilyData& data);
double logistic_loglik(const LogisticParams& params, const BinaryFamilyData& data);

/// Log-likelihood and gradient in unconstrained coordinates: u_i = logit q_i
/// for noisy-or, τ_i for logistic. `gradient` may be empty to skip it.
double noisyor_loglik(std::span<const double> logit_q, const PatternCounts& data,
                      std::span<double> gradient = {});
double logistic_loglik(std::span<const double> tau, const PatternCounts& data,
                       std::span<double> gradient = {});

/// Prior on the unconstrained coordinates. Noisy-or and logistic use an
/// independent zero-mean normal with standard deviation `scale`; the full
/// table uses the symmetric Dirichlet with concentration `alpha_x` per cell,
/// expressed on the logit of each row.
struct LocalPrior {
  double scale = 10.0;
  double alpha_x = 0.5;
  bool operator==(const LocalPrior&) const = default;
};

struct FitOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-8;
};

struct FitResult {
  ModelKind kind = ModelKind::NoisyOr;
  std::vector<double> coords;  // unconstrained MAP point
  double log_posterior = 0.0;  // log likelihood + log prior density at coords
  double gradient_norm = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;  // objective after each accepted step
};

/// Thrown when the ascent hits the iteration cap; carries the best point.
class FitError : public Error {
 public:
  FitError(const std::string& what, FitResult best) : Error(what), best_(std::move(best)) {}
  const FitResult& best_so_far() const noexcept { return best_; }

 private:
  FitResult best_;
};

/// Number of unconstrained coordinates for `kind` on this data.
std::size_t parameter_count(ModelKind kind, const PatternCounts& data);

/// Log posterior density (up to nothing: it includes the normalised prior),
/// its gradient and negative Hessian at `coords`.
struct Objective {
  double value = 0.0;
  std::vector<double> gradient;
  std::vector<double> neg_hessian;  // row-major d × d
};
Objective evaluate_objective(ModelKind kind, std::span<const double> coords,
                             const PatternCounts& data, const LocalPrior& prior,
                             bool with_hessian = true);

/// Damped Newton ascent from `warm_start` (zeros when absent).
FitResult fit_map(ModelKind kind, const PatternCounts& data, const LocalPrior& prior,
                  std::optional<std::span<const double>> warm_start = std::nullopt,
                  const FitOptions& options = {});

/// Normal approximation at the MAP point:
/// log posterior + (d/2) ln 2π − ½ ln det(−H). Throws DomainError when the
/// negative Hessian is not positive definite.
double laplace_log_marginal(ModelKind kind, const PatternCounts& data, const LocalPrior& prior,
                            FitResult* fit = nullptr,
                            std::optional<std::span<const double>> warm_start = std::nullopt);

NoisyOrParams noisyor_from_coords(std::span<const double> coords);
LogisticParams logistic_from_coords(std::span<const double> coords);

/// The score slot carried by lattice nodes next to the exact table score.
struct LocalModelScore {
  ModelKind kind = ModelKind::FullTable;
  std::vector<double> coords;
  double log_marginal = 0.0;

  bool operator==(const LocalModelScore&) const = default;
};

/// Fills the node's model slot for `kind`. FullTable reproduces the exact
/// Dirichlet score; the other kinds need a boolean child and boolean parents
/// (ConfigError otherwise). The previous slot, if any, warm-starts the fit.
LocalModelScore score_node_with_model(CombinedNetwork& net, std::size_t x, std::uint64_t node_bits,
                                      ModelKind kind);

}  // namespace local
}  // namespace bnrefine

#endif  // BNREFINE_LOCAL_MODELS_HPP
