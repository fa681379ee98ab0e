#pragma once

#include "batchsel/finite_sum.hpp"
#include "batchsel/sampling.hpp"

namespace fixture {

using batchsel::Matrix;
using batchsel::Vector;

// f_i(x) = 0.5 (x - a_i)^2, a = [1, 2, 3, 4, 5]; grad f_i(x) = x - a_i.
inline batchsel::FiniteSumProblem five_points() {
  Vector b(5);
  b << 1, 2, 3, 4, 5;
  return batchsel::make_least_squares(Matrix::Ones(5, 1), b);
}

inline Vector scalar(double v) {
  Vector x(1);
  x << v;
  return x;
}

inline Matrix random_matrix(batchsel::SeededRng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = 2.0 * rng.uniform01() - 1.0;
  return m;
}

inline Vector random_vector(batchsel::SeededRng& rng, Eigen::Index n) {
  return random_matrix(rng, n, 1).col(0);
}

}  // namespace fixture
