#include <doctest.h>

#include <cmath>

#include "batchsel/scheduler.hpp"
#include "batchsel/variance.hpp"

using namespace batchsel;

namespace {

// ceil(p / q) for positive integers.
std::uint64_t ceil_div(std::uint64_t p, std::uint64_t q) { return (p + q - 1) / q; }

std::vector<double> decade_sweep(double lo_exp, double hi_exp, int per_decade) {
  std::vector<double> eps;
  for (double e = lo_exp; e <= hi_exp + 1e-9; e += 1.0 / per_decade) eps.push_back(std::pow(10.0, e));
  return eps;
}

}  // namespace

TEST_CASE("epsilon schedules") {
  const auto geo = EpsilonSchedule::geometric(1.0, 0.5);
  CHECK(epsilon_at(geo, 3) == 0.125);
  CHECK(epsilon_at(EpsilonSchedule::power_law(1.0, 2.0), 0) == 1.0);
  CHECK(epsilon_at(EpsilonSchedule::power_law(2.0, 2.0), 3) == doctest::Approx(2.0 / 16.0));

  double partial = 0.0;
  for (std::uint64_t k = 0; k <= 20; ++k) partial += geo.at(k);
  CHECK(partial <= geo.sum_bound());
  CHECK(geo.sum_bound() == 2.0);

  const auto pl = EpsilonSchedule::power_law(1.0, 1.5);
  double pl_sum = 0.0;
  for (std::uint64_t k = 0; k < 100000; ++k) pl_sum += pl.at(k);
  CHECK(pl_sum <= pl.sum_bound());

  for (const auto& s : {geo, pl, EpsilonSchedule::geometric(1.0, 0.9)}) {
    double prev = s.at(0);
    for (std::uint64_t k = 1; k < 20000; k += 7) {
      const double e = s.at(k);
      CHECK(e > 0);
      CHECK(e <= prev);
      prev = e;
    }
  }

  CHECK_THROWS_AS(EpsilonSchedule::geometric(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(EpsilonSchedule::geometric(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(EpsilonSchedule::geometric(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(EpsilonSchedule::power_law(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(EpsilonSchedule::power_law(-1.0, 2.0), std::invalid_argument);
}

TEST_CASE("with-replacement rule") {
  const VarianceCap c(10.0);
  CHECK(min_batch_with_replacement(c, 0.001, 30000, false) == 10000);
  CHECK(min_batch_with_replacement(c, 1e-5, 30000, true) == 30000);
  CHECK(min_batch_with_replacement(c, 1e-5, 30000, false) == 1000000);
  CHECK(min_batch_with_replacement(c, 10.0, 30000, false) == 1);
  CHECK(min_batch_with_replacement(c, 50.0, 30000, false) == 1);
  CHECK(min_batch_with_replacement(c, 10.0 / 30000.0, 30000, false) == 30000);
  CHECK(min_batch_with_replacement(c, 1e-300, 30000, false) == std::numeric_limits<std::uint64_t>::max());
  CHECK_THROWS_AS(min_batch_with_replacement(c, 0.0, 10, false), std::invalid_argument);
  CHECK_THROWS_AS(VarianceCap(0.0), std::invalid_argument);
}

TEST_CASE("without-replacement rule") {
  const VarianceCap c(10.0);
  // 30000 * 10 / (29999 * 0.001 + 10) = 3e8 / 39999 in exact integers.
  CHECK(min_batch_without_replacement(c, 30000, 0.001) == ceil_div(300000000, 39999));
  CHECK(min_batch_without_replacement(c, 30000, 0.001) == 7501);
  // eps = C / N gives N^2 / (2N - 1).
  CHECK(min_batch_without_replacement(c, 30000, 10.0 / 30000.0) == ceil_div(30000ULL * 30000, 59999));
  CHECK(min_batch_without_replacement(c, 30000, 10.0 / 30000.0) == 15001);
  CHECK(min_batch_without_replacement(c, 30000, 1e-300) == 30000);
  CHECK(min_batch_without_replacement(c, 1, 1e-3) == 1);
  CHECK(min_batch_without_replacement(c, 30000, 1e6) == 1);
  CHECK(batch_bound_without_replacement(c, 30000, 1e-12) < 30000.0);
  CHECK_THROWS_AS(min_batch_without_replacement(c, 30000, -1.0), std::invalid_argument);
}

TEST_CASE("without-replacement never exceeds with-replacement") {
  for (std::uint64_t n : {10ULL, 1000ULL, 30000ULL}) {
    for (double cap : {0.5, 10.0, 1000.0}) {
      for (double eps : decade_sweep(-8, 2, 10)) {
        const VarianceCap c(cap);
        const auto with = min_batch_with_replacement(c, eps, n, false);
        const auto without = min_batch_without_replacement(c, n, eps);
        CHECK(without <= with);
        CHECK(without <= std::min(with, n));
        CHECK(batch_bound_without_replacement(c, n, eps) < static_cast<double>(n));
        // The raw bounds only compare this way for eps <= C; above that both
        // are below one and the sizes clamp to 1.
        if (eps <= cap) CHECK(batch_bound_without_replacement(c, n, eps) <= batch_bound_with_replacement(c, eps));
      }
    }
  }
}

TEST_CASE("bounds coincide as N grows") {
  const VarianceCap c(10.0);
  const double ratio = batch_bound_without_replacement(c, 100000000, 1.0) / batch_bound_with_replacement(c, 1.0);
  CHECK(ratio < 1.0);
  CHECK(ratio == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("without-replacement rule monotonicity and homogeneity") {
  const std::uint64_t n = 30000;
  const auto sweep = decade_sweep(-8, 2, 20);
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    // eps increasing -> bound strictly decreasing, size nonincreasing
    CHECK(batch_bound_without_replacement(VarianceCap(10), n, sweep[i]) <
          batch_bound_without_replacement(VarianceCap(10), n, sweep[i - 1]));
    CHECK(min_batch_without_replacement(VarianceCap(10), n, sweep[i]) <=
          min_batch_without_replacement(VarianceCap(10), n, sweep[i - 1]));
  }
  for (double eps : sweep) {
    CHECK(batch_bound_without_replacement(VarianceCap(20), n, eps) >
          batch_bound_without_replacement(VarianceCap(10), n, eps));
    CHECK(min_batch_without_replacement(VarianceCap(20), n, eps) >=
          min_batch_without_replacement(VarianceCap(10), n, eps));
    CHECK(min_batch_without_replacement(VarianceCap(100), n, 10 * eps) ==
          min_batch_without_replacement(VarianceCap(10), n, eps));
  }
}

TEST_CASE("emitted sizes satisfy the variance bound at var_comp = C") {
  // Relative slack covers the integer snapping in the rounding.
  const double slack = 1.0 + 1e-11;
  for (std::uint64_t n : {2ULL, 7ULL, 100ULL, 30000ULL}) {
    for (double cap : {0.1, 1.0, 10.0, 250.0}) {
      for (double eps : decade_sweep(-6, 3, 7)) {
        const VarianceCap c(cap);
        const auto without = min_batch_without_replacement(c, n, eps);
        CHECK(analytic_variance_without_replacement(cap, n, without) <= eps * slack);
        const auto with = min_batch_with_replacement(c, eps, n, false);
        if (with < (1ULL << 40)) CHECK(analytic_variance_with_replacement(cap, with) <= eps * slack);
        // One fewer item breaks the bound: the sizes are minimal.
        if (without > 1) CHECK(analytic_variance_without_replacement(cap, n, without - 1) > eps);
        if (with > 1 && with < (1ULL << 40)) CHECK(analytic_variance_with_replacement(cap, with - 1) > eps);
      }
    }
  }
}

TEST_CASE("next batch size") {
  const auto schedule = EpsilonSchedule::geometric(1.0, 0.9);
  BatchSizeRule rule;
  rule.population = 30000;
  rule.cap = VarianceCap(10.0);

  for (Scheme s : {Scheme::WithReplacement, Scheme::WithoutReplacement}) {
    rule.scheme = s;
    std::size_t prev = rule.floor;
    for (std::uint64_t k = 0; k < 300; ++k) {
      const auto size = next_batch_size(rule, schedule, k, prev);
      CHECK(size >= prev);
      CHECK(size <= rule.population);
      prev = size;
    }
    CHECK(prev == rule.population);
  }

  SUBCASE("monotone flag keeps the previous size") {
    rule.scheme = Scheme::WithoutReplacement;
    CHECK(next_batch_size(rule, schedule, 0, 500) == 500);
    rule.monotone = false;
    CHECK(next_batch_size(rule, schedule, 0, 500) == 10);
  }
  SUBCASE("floor") {
    rule.floor = 64;
    CHECK(next_batch_size(rule, schedule, 0, 64) == 64);
    CHECK_THROWS_AS(next_batch_size(rule, schedule, 0, 1), std::invalid_argument);
  }
  SUBCASE("invalid rule") {
    rule.floor = 0;
    CHECK_THROWS_AS(rule.validate(), std::invalid_argument);
  }
}
