#ifndef BNREFINE_ORACLE_HPP
#define BNREFINE_ORACLE_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "bnrefine/network.hpp"
#include "bnrefine/schema.hpp"

/// Brute-force references for small problems. Every routine here counts and
/// scores from scratch and shares no code path with the incremental engine.
namespace bnrefine::oracle {

inline constexpr std::size_t kMaxCandidates = 15;
inline constexpr std::size_t kMaxJointStates = std::size_t{1} << 20;

struct ExactPosteriorEntry {
  std::vector<std::size_t> parents;  // full parent set, ascending
  double log_score = 0.0;            // log prior + log marginal likelihood
  double probability = 0.0;          // normalised over all subsets
};

/// Exact posterior over every parent set of one variable.
struct ExactPosterior {
  std::size_t variable = 0;
  std::vector<ExactPosteriorEntry> entries;

  double max_log_score() const;
  const ExactPosteriorEntry* find(std::span<const std::size_t> parents) const;
};

/// Enumerates all 2^k subsets of x's uncertain predecessors (mandatory
/// parents always included, forbidden never). GuardError above 15.
ExactPosterior exhaustive_posterior(std::size_t x, std::span<const Example> data,
                                    const ArcPriorMatrix& priors, const PriorConfig& config,
                                    const DomainSchema& schema);

double exhaustive_arc_posterior(const ExactPosterior& posterior, std::size_t y);
double exhaustive_arc_posterior(std::size_t y, std::size_t x, std::span<const Example> data,
                                const ArcPriorMatrix& priors, const PriorConfig& config,
                                const DomainSchema& schema);

/// Probability of every joint assignment, indexed with the first variable
/// most significant. GuardError above 2^20 states.
std::vector<double> full_joint_enumeration(const ConcreteNetwork& network);

/// Inverse of the full-joint indexing.
Example joint_assignment(const DomainSchema& schema, std::size_t index);

struct Grid {
  double lo = -20.0;
  double hi = 20.0;
  std::size_t points = 4001;
};

/// ln ∫ exp(log_likelihood(t) + log_prior(t)) dt by the trapezoid rule.
double quadrature_marginal_1d(const std::function<double(double)>& log_likelihood,
                              const std::function<double(double)>& log_prior_density,
                              const Grid& grid);

}  // namespace bnrefine::oracle

#endif  // BNREFINE_ORACLE_HPP
