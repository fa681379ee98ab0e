#include "batchsel/variance.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace batchsel {

double analytic_variance_with_replacement(double component_variance,
                                          std::size_t batch_size) {
  if (component_variance < 0) throw std::invalid_argument("component variance must be nonnegative");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  return component_variance / static_cast<double>(batch_size);
}

double analytic_variance_without_replacement(double component_variance,
                                             std::size_t population,
                                             std::size_t batch_size) {
  if (component_variance < 0) throw std::invalid_argument("component variance must be nonnegative");
  if (population == 0) throw std::invalid_argument("population must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (batch_size > population) {
    throw std::invalid_argument("batch size " + std::to_string(batch_size) +
                                " exceeds population " + std::to_string(population));
  }
  if (population == 1) return 0.0;
  const double n = static_cast<double>(population);
  const double m = static_cast<double>(batch_size);
  return component_variance / m * ((n - m) / (n - 1.0));
}

double analytic_variance(Scheme scheme, double component_variance,
                         std::size_t population, std::size_t batch_size) {
  return scheme == Scheme::WithReplacement
             ? analytic_variance_with_replacement(component_variance, batch_size)
             : analytic_variance_without_replacement(component_variance, population, batch_size);
}

namespace {

std::vector<Vector> all_component_gradients(const FiniteSumProblem& problem,
                                            const Vector& x) {
  problem.check_dimension(x);
  std::vector<Vector> grads;
  grads.reserve(problem.size());
  for (std::size_t i = 0; i < problem.size(); ++i) grads.push_back(problem.component_gradient(i, x));
  return grads;
}

// Unnormalised log of the i.i.d. probability of a canonical multiset:
// log(N_S!) - sum_j log(m_j!) - N_S log N.
double log_multiset_weight(const Batch& batch) {
  const auto& idx = batch.indices();
  double log_w = std::lgamma(static_cast<double>(idx.size()) + 1.0);
  std::size_t run = 1;
  for (std::size_t i = 1; i <= idx.size(); ++i) {
    if (i < idx.size() && idx[i] == idx[i - 1]) {
      ++run;
    } else {
      log_w -= std::lgamma(static_cast<double>(run) + 1.0);
      run = 1;
    }
  }
  return log_w - static_cast<double>(idx.size()) * std::log(static_cast<double>(batch.population()));
}

// Visits every canonical batch with its probability under the scheme. The
// with-replacement weights are renormalised by their computed sum.
template <typename Fn>
void for_each_weighted_batch(std::size_t population, std::size_t batch_size,
                             Scheme scheme, std::uint64_t cap, Fn&& fn) {
  BatchEnumerator it(population, batch_size, scheme, cap);
  if (scheme == Scheme::WithoutReplacement) {
    const double w = 1.0 / static_cast<double>(it.total());
    while (auto batch = it.next()) fn(*batch, w);
    return;
  }
  std::vector<Batch> batches;
  std::vector<double> weights;
  batches.reserve(it.total());
  weights.reserve(it.total());
  double total = 0.0;
  while (auto batch = it.next()) {
    weights.push_back(std::exp(log_multiset_weight(*batch)));
    total += weights.back();
    batches.push_back(std::move(*batch));
  }
  for (std::size_t j = 0; j < batches.size(); ++j) fn(batches[j], weights[j] / total);
}

Vector mean_over(const std::vector<Vector>& grads, const Batch& batch) {
  Vector sum = Vector::Zero(grads.front().size());
  for (std::size_t i : batch) sum += grads[i];
  return sum / static_cast<double>(batch.size());
}

}  // namespace

Vector exact_batch_mean(const FiniteSumProblem& problem, const Vector& x,
                        std::size_t batch_size, Scheme scheme,
                        std::uint64_t cap) {
  const auto grads = all_component_gradients(problem, x);
  Vector mean = Vector::Zero(x.size());
  for_each_weighted_batch(problem.size(), batch_size, scheme, cap,
                          [&](const Batch& batch, double w) { mean += w * mean_over(grads, batch); });
  return mean;
}

double exact_batch_variance(const FiniteSumProblem& problem, const Vector& x,
                            std::size_t batch_size, Scheme scheme,
                            std::uint64_t cap) {
  const auto grads = all_component_gradients(problem, x);
  Vector full = Vector::Zero(x.size());
  for (const auto& g : grads) full += g;
  full /= static_cast<double>(grads.size());

  double variance = 0.0;
  for_each_weighted_batch(problem.size(), batch_size, scheme, cap, [&](const Batch& batch, double w) {
    variance += w * (mean_over(grads, batch) - full).squaredNorm();
  });
  return variance;
}

double empirical_batch_variance(const FiniteSumProblem& problem,
                                const Vector& x, std::size_t batch_size,
                                Scheme scheme, std::size_t draws,
                                SeededRng& rng) {
  if (draws < 2) throw std::invalid_argument("need at least two Monte Carlo draws");
  const Vector full = full_gradient(problem, x);
  double sum = 0.0;
  for (std::size_t m = 0; m < draws; ++m) {
    const Batch batch = sample_batch(rng, scheme, problem.size(), batch_size);
    sum += (batch_gradient(problem, x, batch) - full).squaredNorm();
  }
  return sum / static_cast<double>(draws);
}

double average_batch_covariance(const FiniteSumProblem& problem,
                                const Vector& x, std::size_t batch_size,
                                std::uint64_t cap) {
  if (batch_size < 2) throw std::invalid_argument("batch covariance needs at least two items per batch");
  if (batch_size > problem.size()) throw std::invalid_argument("batch size exceeds population");
  auto devs = all_component_gradients(problem, x);
  Vector full = Vector::Zero(x.size());
  for (const auto& g : devs) full += g;
  full /= static_cast<double>(devs.size());
  for (auto& g : devs) g -= full;

  const double pairs = static_cast<double>(batch_size) * static_cast<double>(batch_size - 1);
  double total = 0.0;
  std::uint64_t count = 0;
  for_each_batch(problem.size(), batch_size, Scheme::WithoutReplacement, [&](const Batch& batch) {
    const auto& idx = batch.indices();
    double cross = 0.0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = 0; b < idx.size(); ++b) {
        if (a != b) cross += devs[idx[a]].dot(devs[idx[b]]);
      }
    }
    total += cross / pairs;
    ++count;
  }, cap);
  return total / static_cast<double>(count);
}

double recompose_variance(double component_variance, double covariance,
                          std::size_t batch_size) {
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  const double m = static_cast<double>(batch_size);
  return component_variance / m + (m - 1.0) / m * covariance;
}

VarianceReport variance_report(const FiniteSumProblem& problem,
                               const Vector& x, std::size_t batch_size,
                               Scheme scheme, std::uint64_t cap) {
  const double var_comp = component_gradient_variance(problem, x);
  VarianceReport report{scheme, problem.size(), batch_size,
                        analytic_variance(scheme, var_comp, problem.size(), batch_size),
                        std::nullopt, std::nullopt};
  try {
    report.oracle_variance = exact_batch_variance(problem, x, batch_size, scheme, cap);
    if (scheme == Scheme::WithoutReplacement && batch_size >= 2) {
      report.average_batch_covariance = average_batch_covariance(problem, x, batch_size, cap);
    }
  } catch (const EnumerationCapExceeded&) {
    // Oracle fields stay empty; the analytic value is still reported.
  }
  return report;
}

}  // namespace batchsel
