#ifndef BNREFINE_MATH_HPP
#define BNREFINE_MATH_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "bnrefine/counts.hpp"
#include "bnrefine/schema.hpp"

namespace bnrefine {

/// ln Γ(z) for z > 0; DomainError otherwise.
double log_gamma(double z);

/// ln of the multivariate Beta function, Σ ln Γ(n_i) − ln Γ(Σ n_i).
double log_beta_multi(std::span<const double> n);

/// Numerically stable ln Σ exp(v_i). Returns −∞ for an empty span.
double log_sum_exp(std::span<const double> v);

/// Per-cell Dirichlet concentration alpha / (m_x · |v(parents)|). This is
/// the choice that scores Markov-equivalent structures identically.
double alpha_for(std::size_t x, std::span<const std::size_t> parents, const PriorConfig& config,
                 const DomainSchema& schema);

/// ln of the Dirichlet-multinomial marginal likelihood of the counts,
/// summed over observed parent configurations.
double log_marginal_likelihood(const CountTable& counts, double alpha_x);

/// Same, after checking that `counts` is shaped for x given `parents`.
/// Throws StructuralError on a mismatch.
double log_marginal_likelihood(std::size_t x, std::span<const std::size_t> parents,
                               const CountTable& counts, double alpha_x,
                               const DomainSchema& schema);

/// ln Pr(parents | ordering, arc priors) under independent arcs. Returns −∞
/// when the set includes a forbidden arc or omits a mandatory one.
double log_structure_prior(std::size_t x, std::span<const std::size_t> parents,
                           const ArcPriorMatrix& priors, const DomainSchema& schema);

/// Dense conditional probability table: one probability vector of length
/// `arity` per parent configuration.
struct Cpt {
  std::size_t arity = 0;
  std::size_t num_configs = 1;
  std::vector<double> probs;  // row-major, num_configs × arity

  std::span<const double> row(std::size_t j) const {
    return {probs.data() + j * arity, arity};
  }
  std::span<double> row(std::size_t j) { return {probs.data() + j * arity, arity}; }
  double at(std::size_t j, std::size_t i) const { return probs[j * arity + i]; }
  bool operator==(const Cpt&) const = default;
};

/// Posterior mean table (n_{i|j} + α_x) / (n_{·|j} + m_x α_x). Unobserved
/// configurations get the uniform prior mean.
Cpt expected_theta(const CountTable& counts, double alpha_x);

/// Posterior mean for a single row without materialising the table.
std::vector<double> expected_row(const CountTable& counts, ConfigIndex j, double alpha_x);

}  // namespace bnrefine

#endif  // BNREFINE_MATH_HPP
