#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "batchsel/finite_sum.hpp"
#include "batchsel/sampling.hpp"

namespace batchsel {

/// var_comp / N_S: variance of the batch gradient when the N_S items are
/// independent uniform draws.
double analytic_variance_with_replacement(double component_variance,
                                          std::size_t batch_size);

/// var_comp / N_S * (N - N_S) / (N - 1), the finite population corrected
/// variance of a uniformly random N_S-subset. Zero for N = 1.
double analytic_variance_without_replacement(double component_variance,
                                             std::size_t population,
                                             std::size_t batch_size);

double analytic_variance(Scheme scheme, double component_variance,
                         std::size_t population, std::size_t batch_size);

// Exact oracles ------------------------------------------------------------
//
// Both schemes are evaluated by exhaustive enumeration of canonical batches.
// Without replacement every subset has probability 1 / C(N, N_S). With
// replacement the items are i.i.d. draws, so each multiset is weighted by its
// multinomial probability N_S! / (prod m_j!) / N^N_S; this is the same
// measure as enumerating all N^N_S ordered tuples at a fraction of the cost.
// The cap bounds the number of canonical batches visited.

/// E[grad_S F(x)] under the scheme's sampling measure.
Vector exact_batch_mean(const FiniteSumProblem& problem, const Vector& x,
                        std::size_t batch_size, Scheme scheme,
                        std::uint64_t cap = kDefaultEnumerationCap);

/// E||grad_S F(x) - grad F(x)||^2 under the scheme's sampling measure.
double exact_batch_variance(const FiniteSumProblem& problem, const Vector& x,
                            std::size_t batch_size, Scheme scheme,
                            std::uint64_t cap = kDefaultEnumerationCap);

/// Monte Carlo estimate of the batch variance from `draws` sampled batches.
double empirical_batch_variance(const FiniteSumProblem& problem,
                                const Vector& x, std::size_t batch_size,
                                Scheme scheme, std::size_t draws,
                                SeededRng& rng);

/// Average over all N_S-subsets of the mean pairwise inner product of
/// centred component gradients inside the subset, normalised by the number
/// of ordered pairs 2 * C(N_S, 2). Requires 2 <= N_S <= N.
double average_batch_covariance(const FiniteSumProblem& problem,
                                const Vector& x, std::size_t batch_size,
                                std::uint64_t cap = kDefaultEnumerationCap);

/// var_comp / N_S + (N_S - 1) / N_S * covariance: the total variance
/// rebuilt from its diagonal and off-diagonal parts.
double recompose_variance(double component_variance, double covariance,
                          std::size_t batch_size);

struct VarianceReport {
  Scheme scheme;
  std::size_t population;
  std::size_t batch_size;
  double analytic_variance;
  std::optional<double> oracle_variance;
  std::optional<double> average_batch_covariance;
};

/// Closed form next to the enumeration oracle. Oracle fields stay empty when
/// the batch space exceeds the cap (or N_S < 2 for the covariance).
VarianceReport variance_report(const FiniteSumProblem& problem,
                               const Vector& x, std::size_t batch_size,
                               Scheme scheme,
                               std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace batchsel
