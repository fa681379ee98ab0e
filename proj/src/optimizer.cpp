#include "batchsel/optimizer.hpp"

#include <algorithm>
#include <exception>

#include "batchsel/variance.hpp"

namespace batchsel {

double LearningRate::at(std::uint64_t k) const {
  return kind == Kind::Constant ? alpha0 : alpha0 / (static_cast<double>(k) + 1.0);
}

void RunConfig::validate(std::size_t population) const {
  if (!(learning_rate.alpha0 > 0)) throw std::invalid_argument("learning rate must be positive");
  if (max_iterations < 1) throw std::invalid_argument("max iterations must be at least 1");
  if (!(tolerance >= 0)) throw std::invalid_argument("tolerance must be nonnegative");
  rule.validate();
  if (rule.population != population) {
    throw std::invalid_argument("batch rule population does not match the problem size");
  }
  if (cap_mode == CapMode::RunningMax && monitor != StopMonitor::FullGradient) {
    throw std::invalid_argument("running-max cap needs full-gradient statistics");
  }
}

double learning_rate_at(const RunConfig& config, std::uint64_t k) {
  return config.learning_rate.at(k);
}

std::string_view to_string(Termination reason) {
  switch (reason) {
    case Termination::MaxIterations: return "max_iterations";
    case Termination::GradientTolerance: return "gradient_tolerance";
    case Termination::Error: return "error";
  }
  return "unknown";
}

Iterate sgd_step(const FiniteSumProblem& problem, const Iterate& iterate,
                 const Batch& batch, double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("step size must be positive");
  const Vector g = batch_gradient(problem, iterate.x, batch);
  return {iterate.x - alpha * g, iterate.k + 1};
}

RunRecord run(const FiniteSumProblem& problem, const RunConfig& config) {
  config.validate(problem.size());
  const std::size_t n = problem.size();

  RunRecord record;
  Vector x = config.initial.size() == 0 ? Vector::Zero(static_cast<Eigen::Index>(problem.dimension()))
                                        : config.initial;
  problem.check_dimension(x);
  record.final_iterate = {x, 0};

  SeededRng rng(config.seed);
  BatchSizeRule rule = config.rule;
  std::size_t previous = rule.floor;
  double running_max = 0.0;
  const bool full_stats = config.monitor == StopMonitor::FullGradient;
  record.rows.reserve(std::min<std::size_t>(config.max_iterations, 100000));

  try {
    for (std::uint64_t k = 0; k < config.max_iterations; ++k) {
      RunRow row;
      row.k = k;
      row.eps = config.schedule.at(k);
      row.alpha = config.learning_rate.at(k);

      std::optional<GradientStats> stats;
      if (full_stats) stats = gradient_stats(problem, x);
      if (config.cap_mode == CapMode::RunningMax) {
        running_max = std::max(running_max, stats->component_variance);
        if (running_max > 0) rule.cap = VarianceCap(running_max);
      }
      row.cap = rule.cap.value();

      row.batch_size = next_batch_size(rule, config.schedule, k, previous);
      previous = row.batch_size;

      Vector g;
      if (row.batch_size == n) {
        g = stats ? stats->full_gradient : full_gradient(problem, x);
      } else {
        const Batch batch = sample_batch(rng, rule.scheme, n, row.batch_size);
        g = batch_gradient(problem, x, batch);
      }
      row.batch_gradient_norm = g.norm();
      if (stats) {
        row.full_gradient_norm = stats->full_gradient.norm();
        row.component_variance = stats->component_variance;
        row.batch_variance = analytic_variance(rule.scheme, stats->component_variance, n, row.batch_size);
      }
      if (config.record_objective) row.objective = objective(problem, x);

      const double monitored = full_stats ? *row.full_gradient_norm : row.batch_gradient_norm;
      record.rows.push_back(row);
      if (monitored <= config.tolerance) {
        record.termination = Termination::GradientTolerance;
        break;
      }
      x -= row.alpha * g;
      record.final_iterate = {x, k + 1};
    }
  } catch (const std::exception& e) {
    record.termination = Termination::Error;
    record.error = e.what();
  }
  return record;
}

}  // namespace batchsel
