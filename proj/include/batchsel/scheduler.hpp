#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "batchsel/sampling.hpp"

namespace batchsel {

/// Summable sequence of variance tolerances eps_k.
class EpsilonSchedule {
 public:
  enum class Kind { Geometric, PowerLaw };

  /// eps_k = eps0 * rho^k, rho in (0, 1).
  static EpsilonSchedule geometric(double eps0, double rho);
  /// eps_k = eps0 / (k + 1)^p, p > 1.
  static EpsilonSchedule power_law(double eps0, double exponent);

  Kind kind() const { return kind_; }
  double eps0() const { return eps0_; }
  double decay() const { return decay_; }

  double at(std::uint64_t k) const;

  /// Upper bound on sum_k eps_k. Exact for the geometric kind; for the power
  /// law the integral bound eps0 * p / (p - 1).
  double sum_bound() const;

 private:
  EpsilonSchedule(Kind kind, double eps0, double decay)
      : kind_(kind), eps0_(eps0), decay_(decay) {}

  Kind kind_;
  double eps0_;
  double decay_;
};

inline double epsilon_at(const EpsilonSchedule& schedule, std::uint64_t k) {
  return schedule.at(k);
}

/// Upper bound C imposed on the component gradient variance.
class VarianceCap {
 public:
  explicit VarianceCap(double value) : value_(value) {
    if (!(value > 0)) throw std::invalid_argument("variance cap must be positive");
  }
  double value() const { return value_; }

 private:
  double value_;
};

/// Quotients this close (relatively) to an integer are snapped to it before
/// taking the ceiling, so that e.g. 10 / 0.001 yields 10000 and not 10001.
inline constexpr double kRoundingSlack = 1e-12;

/// ceil(C / eps), at least 1; clamped to N when `truncate` is set. Saturates
/// at UINT64_MAX when untruncated.
std::uint64_t min_batch_with_replacement(VarianceCap cap, double eps,
                                         std::uint64_t population,
                                         bool truncate);

/// ceil(N * C / ((N - 1) * eps + C)), clamped to [1, N].
std::uint64_t min_batch_without_replacement(VarianceCap cap,
                                            std::uint64_t population,
                                            double eps);

/// Real-valued right-hand sides of the two batch bounds, before rounding.
double batch_bound_with_replacement(VarianceCap cap, double eps);
double batch_bound_without_replacement(VarianceCap cap, std::uint64_t population,
                                       double eps);

struct BatchSizeRule {
  Scheme scheme = Scheme::WithoutReplacement;
  VarianceCap cap{10.0};
  std::size_t population = 1;
  std::size_t floor = 1;
  bool monotone = true;

  void validate() const;
};

/// Minimal batch size at tolerance eps under the rule, in [floor, N].
std::size_t batch_size_for(const BatchSizeRule& rule, double eps);

/// Batch size for iteration k. With the monotone flag the result never drops
/// below `previous`.
std::size_t next_batch_size(const BatchSizeRule& rule,
                            const EpsilonSchedule& schedule, std::uint64_t k,
                            std::size_t previous);

}  // namespace batchsel
