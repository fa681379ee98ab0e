#include "batchsel/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace batchsel {

EpsilonSchedule EpsilonSchedule::geometric(double eps0, double rho) {
  if (!(eps0 > 0) || !std::isfinite(eps0)) throw std::invalid_argument("eps0 must be positive and finite");
  if (!(rho > 0 && rho < 1)) throw std::invalid_argument("geometric decay rho must lie in (0, 1)");
  return EpsilonSchedule(Kind::Geometric, eps0, rho);
}

EpsilonSchedule EpsilonSchedule::power_law(double eps0, double exponent) {
  if (!(eps0 > 0) || !std::isfinite(eps0)) throw std::invalid_argument("eps0 must be positive and finite");
  if (!(exponent > 1) || !std::isfinite(exponent)) {
    throw std::invalid_argument("power-law exponent must exceed 1 for a summable schedule");
  }
  return EpsilonSchedule(Kind::PowerLaw, eps0, exponent);
}

double EpsilonSchedule::at(std::uint64_t k) const {
  const double kd = static_cast<double>(k);
  double eps = kind_ == Kind::Geometric ? eps0_ * std::pow(decay_, kd)
                                        : eps0_ / std::pow(kd + 1.0, decay_);
  // Deep into the schedule the value underflows; keep it strictly positive.
  return std::max(eps, std::numeric_limits<double>::denorm_min());
}

double EpsilonSchedule::sum_bound() const {
  return kind_ == Kind::Geometric ? eps0_ / (1.0 - decay_)
                                  : eps0_ * decay_ / (decay_ - 1.0);
}

namespace {

void check_eps(double eps) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
}

constexpr auto kMaxSize = std::numeric_limits<std::uint64_t>::max();

std::uint64_t ceil_to_size(double q) {
  if (q <= 1.0) return 1;
  if (!(q < 0x1.0p64)) return kMaxSize;
  const double nearest = std::nearbyint(q);
  const double rounded = std::abs(q - nearest) <= kRoundingSlack * q ? nearest : std::ceil(q);
  if (!(rounded < 0x1.0p64)) return kMaxSize;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(rounded));
}

}  // namespace

double batch_bound_with_replacement(VarianceCap cap, double eps) {
  check_eps(eps);
  return cap.value() / eps;
}

double batch_bound_without_replacement(VarianceCap cap, std::uint64_t population,
                                       double eps) {
  check_eps(eps);
  if (population == 0) throw std::invalid_argument("population must be positive");
  const double n = static_cast<double>(population);
  const double c = cap.value();
  return n * c / ((n - 1.0) * eps + c);
}

std::uint64_t min_batch_with_replacement(VarianceCap cap, double eps,
                                         std::uint64_t population,
                                         bool truncate) {
  const auto size = ceil_to_size(batch_bound_with_replacement(cap, eps));
  if (!truncate) return size;
  if (population == 0) throw std::invalid_argument("population must be positive");
  return std::min(size, population);
}

std::uint64_t min_batch_without_replacement(VarianceCap cap,
                                            std::uint64_t population,
                                            double eps) {
  const auto size = ceil_to_size(batch_bound_without_replacement(cap, population, eps));
  return std::clamp<std::uint64_t>(size, 1, population);
}

void BatchSizeRule::validate() const {
  if (population == 0) throw std::invalid_argument("batch rule population must be positive");
  if (floor < 1 || floor > population) {
    throw std::invalid_argument("batch floor " + std::to_string(floor) + " outside [1, " +
                                std::to_string(population) + "]");
  }
}

std::size_t batch_size_for(const BatchSizeRule& rule, double eps) {
  rule.validate();
  const std::uint64_t n = rule.population;
  const std::uint64_t size = rule.scheme == Scheme::WithReplacement
                                 ? min_batch_with_replacement(rule.cap, eps, n, true)
                                 : min_batch_without_replacement(rule.cap, n, eps);
  return std::clamp<std::size_t>(static_cast<std::size_t>(size), rule.floor, rule.population);
}

std::size_t next_batch_size(const BatchSizeRule& rule,
                            const EpsilonSchedule& schedule, std::uint64_t k,
                            std::size_t previous) {
  rule.validate();
  if (previous < rule.floor || previous > rule.population) {
    throw std::invalid_argument("previous batch size " + std::to_string(previous) +
                                " outside the rule's range");
  }
  const std::size_t size = batch_size_for(rule, schedule.at(k));
  return rule.monotone ? std::max(previous, size) : size;
}

}  // namespace batchsel
