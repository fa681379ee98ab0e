#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "batchsel/finite_sum.hpp"
#include "batchsel/sampling.hpp"
#include "batchsel/scheduler.hpp"

namespace batchsel {

struct LearningRate {
  enum class Kind { Constant, Decaying };

  Kind kind = Kind::Constant;
  double alpha0 = 0.1;

  static LearningRate constant(double alpha) { return {Kind::Constant, alpha}; }
  /// alpha0 / (k + 1)
  static LearningRate decaying(double alpha0) { return {Kind::Decaying, alpha0}; }

  double at(std::uint64_t k) const;
};

enum class StopMonitor {
  FullGradient,   // exact ||grad F||, affordable at desk scale
  BatchGradient,  // ||grad_S F||, heuristic for large N
};

enum class CapMode {
  Fixed,
  // Extension: C follows the running maximum of the measured component
  // variance. Requires full-gradient statistics at every iterate.
  RunningMax,
};

struct RunConfig {
  BatchSizeRule rule;
  EpsilonSchedule schedule = EpsilonSchedule::geometric(1.0, 0.9);
  LearningRate learning_rate;
  std::size_t max_iterations = 500;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  StopMonitor monitor = StopMonitor::FullGradient;
  CapMode cap_mode = CapMode::Fixed;
  bool record_objective = true;
  /// Starting point; empty means the zero vector.
  Vector initial;

  void validate(std::size_t population) const;
};

double learning_rate_at(const RunConfig& config, std::uint64_t k);

/// One row per iteration, describing the step taken from x^(k).
struct RunRow {
  std::uint64_t k = 0;
  double eps = 0.0;
  std::size_t batch_size = 0;
  double alpha = 0.0;
  double cap = 0.0;
  double batch_gradient_norm = 0.0;
  std::optional<double> full_gradient_norm;
  std::optional<double> objective;
  /// Measured Var[grad f_i(x^(k))] and the resulting batch variance at the
  /// emitted size; present whenever full-gradient statistics are computed.
  std::optional<double> component_variance;
  std::optional<double> batch_variance;
};

enum class Termination { MaxIterations, GradientTolerance, Error };

std::string_view to_string(Termination reason);

struct RunRecord {
  std::vector<RunRow> rows;
  Iterate final_iterate;
  Termination termination = Termination::MaxIterations;
  std::string error;  // set when termination == Error
};

/// x^(k+1) = x^(k) - alpha * grad_S F(x^(k)). The input is left untouched.
Iterate sgd_step(const FiniteSumProblem& problem, const Iterate& iterate,
                 const Batch& batch, double alpha);

/// Runs SGD with scheduler-driven batch sizes. Deterministic in (config,
/// seed). When the rule asks for the whole population the exact gradient is
/// used and no batch is drawn.
RunRecord run(const FiniteSumProblem& problem, const RunConfig& config);

}  // namespace batchsel
