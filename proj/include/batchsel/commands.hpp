#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "batchsel/finite_sum.hpp"
#include "batchsel/optimizer.hpp"
#include "batchsel/sampling.hpp"

namespace batchsel::cli {

enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailure = 1,
  kUsageError = 2,
  kIoError = 3,
};

/// Random d-dimensional least-squares problem with entries uniform in
/// [-1, 1], plus a random evaluation point. Deterministic in (N, d, seed).
struct RandomInstance {
  FiniteSumProblem problem;
  Vector x;
};
RandomInstance random_least_squares(std::size_t population, std::size_t dimension,
                                    std::uint64_t seed);

/// The 1-D problem f_i(x) = 0.5 (x - a_i)^2 with a = [1, 2, 3, 4, 5].
FiniteSumProblem demo_least_squares();

// verify -------------------------------------------------------------------

inline constexpr double kVerifyTolerance = 1e-10;

struct VerifyOptions {
  std::size_t n_min = 1;
  std::size_t n_max = 10;
  std::size_t dimension = 2;
  std::uint64_t cap = kDefaultEnumerationCap;
  std::uint64_t seed = 0;
  std::filesystem::path out = ".";
};

struct VerifyRow {
  std::size_t population;
  std::size_t batch_size;
  Scheme scheme;
  double analytic;
  std::optional<double> oracle;  // empty when the enumeration cap is hit

  std::optional<double> abs_err() const;
  bool passed() const;
};

std::vector<VerifyRow> verify_rows(const VerifyOptions& options);
void write_verify_csv(std::ostream& out, const std::vector<VerifyRow>& rows);

// growth-curve -------------------------------------------------------------

struct GrowthOptions {
  double cap = 10.0;
  std::uint64_t population = 30000;
  double eps0 = 1.0;
  double rho = 0.9;
  std::uint64_t k_max = 200;  // inclusive
  std::filesystem::path out = ".";
};

struct GrowthRow {
  std::uint64_t k;
  double eps;
  std::uint64_t size_with_truncated;
  std::uint64_t size_without;
  double bound_with;
  double bound_without;
};

std::vector<GrowthRow> growth_curve(const GrowthOptions& options);
void write_growth_csv(std::ostream& out, const std::vector<GrowthRow>& rows);
void write_growth_svg(std::ostream& out, const std::vector<GrowthRow>& rows,
                      const GrowthOptions& options);

// train --------------------------------------------------------------------

struct TrainOptions {
  std::string problem = "lsq-demo";  // built-in name or dataset path
  std::string model = "least-squares";
  Scheme scheme = Scheme::WithoutReplacement;
  double cap = 10.0;
  bool auto_cap = false;
  double eps0 = 1.0;
  double rho = 0.9;
  std::optional<double> power_exponent;  // switches to eps0 / (k+1)^p
  double alpha = 0.1;
  bool decaying = false;
  std::size_t max_iters = 500;
  double tol = 0.0;
  std::uint64_t seed = 0;
  std::string monitor = "full";
  std::filesystem::path out = ".";
};

FiniteSumProblem make_training_problem(const TrainOptions& options);
RunConfig make_run_config(const TrainOptions& options, std::size_t population);
void write_run_csv(std::ostream& out, const RunRecord& record);

// Subcommands write their files under `out` and a summary to `log`.
int cmd_verify(const VerifyOptions& options, std::ostream& log, std::ostream& err);
int cmd_growth_curve(const GrowthOptions& options, std::ostream& log, std::ostream& err);
int cmd_train(const TrainOptions& options, std::ostream& log, std::ostream& err);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace batchsel::cli
