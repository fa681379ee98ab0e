#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace batchsel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class Batch;

/// Raised when a vector's length does not match the problem dimension.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A differentiable finite sum F(x) = (1/N) sum_i f_i(x).
///
/// The evaluators must be pure. Instances are immutable once built and can be
/// shared across threads for reading.
class FiniteSumProblem {
 public:
  using ValueFn = std::function<double(std::size_t, const Vector&)>;
  using GradientFn = std::function<Vector(std::size_t, const Vector&)>;

  FiniteSumProblem(std::size_t dimension, std::size_t components,
                   ValueFn value, GradientFn gradient);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return components_; }

  double component_value(std::size_t i, const Vector& x) const;
  Vector component_gradient(std::size_t i, const Vector& x) const;

  void check_dimension(const Vector& x) const;

 private:
  std::size_t dimension_;
  std::size_t components_;
  ValueFn value_;
  GradientFn gradient_;
};

struct Iterate {
  Vector x;
  std::size_t k = 0;
};

struct GradientStats {
  Vector full_gradient;
  double component_variance = 0.0;
};

double objective(const FiniteSumProblem& problem, const Vector& x);

Vector full_gradient(const FiniteSumProblem& problem, const Vector& x);

/// Mean of the component gradients over the batch; repeated indices count
/// with multiplicity.
Vector batch_gradient(const FiniteSumProblem& problem, const Vector& x,
                      const Batch& batch);

/// Population variance (1/N) sum_i ||grad f_i(x) - grad F(x)||^2.
double component_gradient_variance(const FiniteSumProblem& problem,
                                   const Vector& x);

/// Full gradient and component variance from a single pass of gradient
/// evaluations.
GradientStats gradient_stats(const FiniteSumProblem& problem, const Vector& x);

/// f_i(x) = 0.5 * (a_i^T x - b_i)^2 with a_i the i-th row of `a`.
FiniteSumProblem make_least_squares(Matrix a, Vector b);

/// f_i(x) = log(1 + exp(-y_i a_i^T x)), labels in {-1, +1}.
FiniteSumProblem make_logistic(Matrix a, Vector y);

// Dataset ingestion --------------------------------------------------------

class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::string& what, std::size_t line);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class Delimiter { Auto, Comma, Whitespace };

struct Dataset {
  Matrix features;  // N x d
  Vector labels;    // N

  std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(features.cols()); }
};

/// Reads delimited numeric text, one component per row with the label in the
/// last column. Blank lines and lines starting with '#' are skipped.
Dataset load_dataset(const std::filesystem::path& path,
                     Delimiter delimiter = Delimiter::Auto);

Dataset parse_dataset(std::istream& in, Delimiter delimiter = Delimiter::Auto);

}  // namespace batchsel
