#include "batchsel/finite_sum.hpp"

#include <cmath>
#include <memory>
#include <string>
#include <utility>

#include "batchsel/sampling.hpp"

namespace batchsel {

FiniteSumProblem::FiniteSumProblem(std::size_t dimension,
                                   std::size_t components, ValueFn value,
                                   GradientFn gradient)
    : dimension_(dimension),
      components_(components),
      value_(std::move(value)),
      gradient_(std::move(gradient)) {
  if (dimension_ == 0) throw std::invalid_argument("problem dimension must be positive");
  if (components_ == 0) throw std::invalid_argument("problem needs at least one component");
  if (!value_ || !gradient_) throw std::invalid_argument("problem evaluators must be set");
}

void FiniteSumProblem::check_dimension(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dimension_) {
    throw DimensionError("expected vector of length " + std::to_string(dimension_) +
                         ", got " + std::to_string(x.size()));
  }
}

double FiniteSumProblem::component_value(std::size_t i, const Vector& x) const {
  if (i >= components_) throw std::out_of_range("component index " + std::to_string(i) + " out of range");
  return value_(i, x);
}

Vector FiniteSumProblem::component_gradient(std::size_t i, const Vector& x) const {
  if (i >= components_) throw std::out_of_range("component index " + std::to_string(i) + " out of range");
  Vector g = gradient_(i, x);
  if (static_cast<std::size_t>(g.size()) != dimension_) {
    throw DimensionError("component gradient has wrong length");
  }
  return g;
}

double objective(const FiniteSumProblem& problem, const Vector& x) {
  problem.check_dimension(x);
  double sum = 0.0;
  for (std::size_t i = 0; i < problem.size(); ++i) sum += problem.component_value(i, x);
  return sum / static_cast<double>(problem.size());
}

Vector full_gradient(const FiniteSumProblem& problem, const Vector& x) {
  problem.check_dimension(x);
  Vector sum = Vector::Zero(x.size());
  for (std::size_t i = 0; i < problem.size(); ++i) sum += problem.component_gradient(i, x);
  return sum / static_cast<double>(problem.size());
}

Vector batch_gradient(const FiniteSumProblem& problem, const Vector& x,
                      const Batch& batch) {
  problem.check_dimension(x);
  if (batch.size() == 0) throw std::invalid_argument("empty batch");
  if (batch.population() != problem.size()) {
    throw std::invalid_argument("batch population does not match problem size");
  }
  Vector sum = Vector::Zero(x.size());
  for (std::size_t i : batch) sum += problem.component_gradient(i, x);
  return sum / static_cast<double>(batch.size());
}

GradientStats gradient_stats(const FiniteSumProblem& problem, const Vector& x) {
  problem.check_dimension(x);
  const std::size_t n = problem.size();
  std::vector<Vector> grads;
  grads.reserve(n);
  Vector sum = Vector::Zero(x.size());
  for (std::size_t i = 0; i < n; ++i) {
    grads.push_back(problem.component_gradient(i, x));
    sum += grads.back();
  }
  GradientStats stats;
  stats.full_gradient = sum / static_cast<double>(n);
  double spread = 0.0;
  for (const auto& g : grads) spread += (g - stats.full_gradient).squaredNorm();
  stats.component_variance = spread / static_cast<double>(n);
  return stats;
}

double component_gradient_variance(const FiniteSumProblem& problem,
                                   const Vector& x) {
  return gradient_stats(problem, x).component_variance;
}

FiniteSumProblem make_least_squares(Matrix a, Vector b) {
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("least squares: empty design matrix");
  if (a.rows() != b.size()) throw DimensionError("least squares: A has " + std::to_string(a.rows()) +
                                                 " rows but b has " + std::to_string(b.size()) + " entries");
  const auto rows = static_cast<std::size_t>(a.rows());
  const auto cols = static_cast<std::size_t>(a.cols());
  // Shared so copies of the problem don't duplicate the data.
  auto data = std::make_shared<const std::pair<Matrix, Vector>>(std::move(a), std::move(b));
  return FiniteSumProblem(
      cols, rows,
      [data](std::size_t i, const Vector& x) {
        const auto idx = static_cast<Eigen::Index>(i);
        const double r = data->first.row(idx).dot(x) - data->second(idx);
        return 0.5 * r * r;
      },
      [data](std::size_t i, const Vector& x) -> Vector {
        const auto idx = static_cast<Eigen::Index>(i);
        const double r = data->first.row(idx).dot(x) - data->second(idx);
        return data->first.row(idx).transpose() * r;
      });
}

namespace {

// log(1 + exp(t)) without overflow for large t.
double softplus(double t) {
  return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

FiniteSumProblem make_logistic(Matrix a, Vector y) {
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("logistic: empty design matrix");
  if (a.rows() != y.size()) throw DimensionError("logistic: A has " + std::to_string(a.rows()) +
                                                 " rows but y has " + std::to_string(y.size()) + " labels");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 1.0 && y(i) != -1.0) {
      throw std::invalid_argument("logistic: label at row " + std::to_string(i) + " is not -1 or +1");
    }
  }
  const auto rows = static_cast<std::size_t>(a.rows());
  const auto cols = static_cast<std::size_t>(a.cols());
  auto data = std::make_shared<const std::pair<Matrix, Vector>>(std::move(a), std::move(y));
  return FiniteSumProblem(
      cols, rows,
      [data](std::size_t i, const Vector& x) {
        const auto idx = static_cast<Eigen::Index>(i);
        const double margin = data->second(idx) * data->first.row(idx).dot(x);
        return softplus(-margin);
      },
      [data](std::size_t i, const Vector& x) -> Vector {
        const auto idx = static_cast<Eigen::Index>(i);
        const double yi = data->second(idx);
        const double margin = yi * data->first.row(idx).dot(x);
        // d/dx log(1 + exp(-m)) = -y * sigmoid(-m) * a
        return data->first.row(idx).transpose() * (-yi * sigmoid(-margin));
      });
}

}  // namespace batchsel
