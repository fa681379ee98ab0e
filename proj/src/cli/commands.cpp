#include "batchsel/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ios>
#include <stdexcept>

#include <CLI11.hpp>

#include "batchsel/report.hpp"
#include "batchsel/scheduler.hpp"
#include "batchsel/variance.hpp"

namespace batchsel::cli {

namespace fs = std::filesystem;

RandomInstance random_least_squares(std::size_t population, std::size_t dimension,
                                    std::uint64_t seed) {
  // Distinct streams per population size under one user seed.
  SeededRng rng(seed ^ (0x9E3779B97F4A7C15ULL * (population + 1)));
  auto uniform = [&rng] { return 2.0 * rng.uniform01() - 1.0; };
  const auto n = static_cast<Eigen::Index>(population);
  const auto d = static_cast<Eigen::Index>(dimension);
  Matrix a(n, d);
  Vector b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = uniform();
    b(i) = uniform();
  }
  Vector x(d);
  for (Eigen::Index j = 0; j < d; ++j) x(j) = uniform();
  return {make_least_squares(std::move(a), std::move(b)), std::move(x)};
}

FiniteSumProblem demo_least_squares() {
  Vector b(5);
  b << 1, 2, 3, 4, 5;
  return make_least_squares(Matrix::Ones(5, 1), std::move(b));
}

namespace {

fs::path prepare_output(const fs::path& dir, const std::string& file) {
  fs::create_directories(dir);
  return dir / file;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write '" + path.string() + "'");
  return out;
}

// Maps the exception families raised below a subcommand to exit codes.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const DatasetError& e) {
    err << "error: dataset: " << e.what() << '\n';
    return kIoError;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "error: invalid configuration: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace

// verify -------------------------------------------------------------------

std::optional<double> VerifyRow::abs_err() const {
  if (!oracle) return std::nullopt;
  return std::abs(analytic - *oracle);
}

bool VerifyRow::passed() const {
  const auto e = abs_err();
  return !e || *e <= kVerifyTolerance;
}

std::vector<VerifyRow> verify_rows(const VerifyOptions& options) {
  if (options.n_min < 1 || options.n_max < options.n_min) {
    throw std::invalid_argument("verify needs 1 <= n-min <= n-max");
  }
  if (options.dimension < 1) throw std::invalid_argument("verify dimension must be positive");
  std::vector<VerifyRow> rows;
  for (std::size_t n = options.n_min; n <= options.n_max; ++n) {
    const auto inst = random_least_squares(n, options.dimension, options.seed);
    const double var_comp = component_gradient_variance(inst.problem, inst.x);
    for (Scheme scheme : {Scheme::WithReplacement, Scheme::WithoutReplacement}) {
      for (std::size_t m = 1; m <= n; ++m) {
        VerifyRow row{n, m, scheme, analytic_variance(scheme, var_comp, n, m), std::nullopt};
        try {
          row.oracle = exact_batch_variance(inst.problem, inst.x, m, scheme, options.cap);
        } catch (const EnumerationCapExceeded&) {
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void write_verify_csv(std::ostream& out, const std::vector<VerifyRow>& rows) {
  report::CsvWriter csv(out, {"N", "N_S", "scheme", "analytic", "oracle", "abs_err"});
  for (const auto& r : rows) {
    csv.field(std::uint64_t{r.population}).field(std::uint64_t{r.batch_size}).field(to_string(r.scheme));
    csv.field(r.analytic);
    if (r.oracle) {
      csv.field(*r.oracle).field(*r.abs_err());
    } else {
      csv.field(std::string_view("NA")).field(std::string_view("NA"));
    }
    csv.end_row();
  }
}

int cmd_verify(const VerifyOptions& options, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const auto rows = verify_rows(options);
    const auto path = prepare_output(options.out, "verify.csv");
    auto file = open_output(path);
    write_verify_csv(file, rows);

    std::size_t failures = 0, skipped = 0;
    double worst = 0.0;
    for (const auto& r : rows) {
      if (!r.oracle) {
        ++skipped;
        err << "warning: N=" << r.population << " N_S=" << r.batch_size << ' '
            << to_string(r.scheme) << ": enumeration cap exceeded, oracle skipped\n";
        continue;
      }
      worst = std::max(worst, *r.abs_err());
      if (!r.passed()) ++failures;
    }
    log << "verify: " << rows.size() << " rows, " << failures << " failed, " << skipped
        << " skipped (cap), max abs_err " << report::format_double(worst) << " -> "
        << path.string() << '\n';
    return failures == 0 ? kSuccess : kVerificationFailure;
  });
}

// growth-curve -------------------------------------------------------------

std::vector<GrowthRow> growth_curve(const GrowthOptions& options) {
  const VarianceCap cap(options.cap);
  if (options.population < 2) throw std::invalid_argument("growth curve needs N >= 2");
  const auto schedule = EpsilonSchedule::geometric(options.eps0, options.rho);
  std::vector<GrowthRow> rows;
  rows.reserve(options.k_max + 1);
  for (std::uint64_t k = 0; k <= options.k_max; ++k) {
    const double eps = schedule.at(k);
    rows.push_back({k, eps, min_batch_with_replacement(cap, eps, options.population, true),
                    min_batch_without_replacement(cap, options.population, eps),
                    std::min(static_cast<double>(options.population), batch_bound_with_replacement(cap, eps)),
                    batch_bound_without_replacement(cap, options.population, eps)});
  }
  return rows;
}

void write_growth_csv(std::ostream& out, const std::vector<GrowthRow>& rows) {
  report::CsvWriter csv(out, {"k", "eps", "size_with_replacement_truncated", "size_without_replacement",
                              "bound_with_replacement_truncated", "bound_without_replacement"});
  for (const auto& r : rows) {
    csv.field(r.k).field(r.eps).field(r.size_with_truncated).field(r.size_without);
    csv.field(r.bound_with).field(r.bound_without);
    csv.end_row();
  }
}

void write_growth_svg(std::ostream& out, const std::vector<GrowthRow>& rows,
                      const GrowthOptions& options) {
  report::Series without{"without replacement", "#d62728", {}, {}};
  report::Series with{"with replacement (min(N, .))", "#1f77b4", {}, {}};
  for (const auto& r : rows) {
    without.x.push_back(static_cast<double>(r.k));
    without.y.push_back(static_cast<double>(r.size_without));
    with.x.push_back(static_cast<double>(r.k));
    with.y.push_back(static_cast<double>(r.size_with_truncated));
  }
  report::ChartOptions chart;
  chart.title = "Batch size growth, C=" + report::format_double(options.cap) +
                ", N=" + std::to_string(options.population);
  chart.x_label = "k";
  chart.y_label = "batch size";
  report::write_line_chart_svg(out, {without, with}, chart);
}

int cmd_growth_curve(const GrowthOptions& options, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const auto rows = growth_curve(options);
    const auto csv_path = prepare_output(options.out, "growth.csv");
    {
      auto file = open_output(csv_path);
      write_growth_csv(file, rows);
    }
    const auto svg_path = options.out / "growth.svg";
    {
      auto file = open_output(svg_path);
      write_growth_svg(file, rows, options);
    }
    log << "growth-curve: " << rows.size() << " rows -> " << csv_path.string() << ", "
        << svg_path.string() << '\n';
    return kSuccess;
  });
}

// train --------------------------------------------------------------------

namespace {

FiniteSumProblem demo_logistic() {
  // 200 points in 3-D with labels from a fixed hyperplane, 10% flipped.
  SeededRng rng(20240101);
  const Eigen::Index n = 200, d = 3;
  Matrix a(n, d);
  Vector y(n);
  Vector w(d);
  w << 1.5, -2.0, 0.5;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = 2.0 * rng.uniform01() - 1.0;
    y(i) = a.row(i).dot(w) >= 0 ? 1.0 : -1.0;
    if (rng.uniform01() < 0.1) y(i) = -y(i);
  }
  return make_logistic(std::move(a), std::move(y));
}

}  // namespace

FiniteSumProblem make_training_problem(const TrainOptions& options) {
  if (options.problem == "lsq-demo") return demo_least_squares();
  if (options.problem == "logistic-demo") return demo_logistic();
  auto data = load_dataset(options.problem);
  if (options.model == "least-squares") return make_least_squares(std::move(data.features), std::move(data.labels));
  if (options.model == "logistic") return make_logistic(std::move(data.features), std::move(data.labels));
  throw std::invalid_argument("unknown model '" + options.model + "'");
}

RunConfig make_run_config(const TrainOptions& options, std::size_t population) {
  RunConfig config;
  config.rule.scheme = options.scheme;
  config.rule.cap = VarianceCap(options.cap);
  config.rule.population = population;
  config.schedule = options.power_exponent
                        ? EpsilonSchedule::power_law(options.eps0, *options.power_exponent)
                        : EpsilonSchedule::geometric(options.eps0, options.rho);
  config.learning_rate = options.decaying ? LearningRate::decaying(options.alpha)
                                          : LearningRate::constant(options.alpha);
  config.max_iterations = options.max_iters;
  config.tolerance = options.tol;
  config.seed = options.seed;
  if (options.monitor == "full") {
    config.monitor = StopMonitor::FullGradient;
  } else if (options.monitor == "batch") {
    config.monitor = StopMonitor::BatchGradient;
  } else {
    throw std::invalid_argument("unknown monitor '" + options.monitor + "'");
  }
  config.cap_mode = options.auto_cap ? CapMode::RunningMax : CapMode::Fixed;
  config.validate(population);
  return config;
}

void write_run_csv(std::ostream& out, const RunRecord& record) {
  report::CsvWriter csv(out, {"k", "eps", "batch_size", "alpha", "cap", "batch_grad_norm",
                              "full_grad_norm", "objective", "component_variance", "batch_variance"});
  for (const auto& r : record.rows) {
    csv.field(r.k).field(r.eps).field(std::uint64_t{r.batch_size}).field(r.alpha).field(r.cap);
    csv.field(r.batch_gradient_norm).field(r.full_gradient_norm).field(r.objective);
    csv.field(r.component_variance).field(r.batch_variance);
    csv.end_row();
  }
}

int cmd_train(const TrainOptions& options, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const auto problem = make_training_problem(options);
    const auto config = make_run_config(options, problem.size());
    const auto record = run(problem, config);

    const auto path = prepare_output(options.out, "train.csv");
    {
      auto file = open_output(path);
      write_run_csv(file, record);
    }

    const auto& x = record.final_iterate.x;
    log << "train: " << to_string(record.termination) << " after " << record.rows.size()
        << " iterations (N=" << problem.size() << ", d=" << problem.dimension() << ")\n";
    log << "  final x = [";
    for (Eigen::Index j = 0; j < std::min<Eigen::Index>(x.size(), 8); ++j) {
      log << (j ? ", " : "") << report::format_double(x(j));
    }
    log << (x.size() > 8 ? ", ...]\n" : "]\n");
    if (!record.rows.empty()) {
      log << "  last batch size " << record.rows.back().batch_size << ", objective "
          << report::format_double(objective(problem, x)) << '\n';
    }
    log << "  -> " << path.string() << '\n';
    if (record.termination == Termination::Error) {
      err << "error: run aborted: " << record.error << '\n';
      return kVerificationFailure;
    }
    return kSuccess;
  });
}

// entry point --------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variance-controlled batch size selection for finite-sum SGD"};
  app.set_config("--config", "", "Read options from a key=value file ([subcommand] sections)");
  app.require_subcommand(1);

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check closed-form batch variances against exact enumeration");
  verify_cmd->add_option("--n-min", verify.n_min, "Smallest population size")->capture_default_str();
  verify_cmd->add_option("--n-max", verify.n_max, "Largest population size")->capture_default_str();
  verify_cmd->add_option("--dim", verify.dimension, "Problem dimension")->capture_default_str();
  verify_cmd->add_option("--cap", verify.cap, "Maximum number of batches to enumerate")->capture_default_str();
  verify_cmd->add_option("--seed", verify.seed, "Seed for the random problems")->capture_default_str();
  verify_cmd->add_option("--out", verify.out, "Output directory")->capture_default_str();

  GrowthOptions growth;
  auto* growth_cmd = app.add_subcommand("growth-curve", "Batch size growth under both sampling schemes");
  growth_cmd->add_option("--C", growth.cap, "Upper bound on the component gradient variance")->capture_default_str();
  growth_cmd->add_option("--N", growth.population, "Population size")->capture_default_str();
  growth_cmd->add_option("--eps0", growth.eps0, "First tolerance of the geometric schedule")->capture_default_str();
  growth_cmd->add_option("--rho", growth.rho, "Geometric decay factor")->capture_default_str();
  growth_cmd->add_option("--kmax", growth.k_max, "Last iteration index")->capture_default_str();
  growth_cmd->add_option("--out", growth.out, "Output directory")->capture_default_str();

  TrainOptions train;
  std::string scheme = "without";
  std::optional<double> power;
  auto* train_cmd = app.add_subcommand("train", "Run SGD with an adaptive batch size");
  train_cmd->add_option("--problem", train.problem, "lsq-demo, logistic-demo, or a dataset path")->capture_default_str();
  train_cmd->add_option("--model", train.model, "Model for dataset files: least-squares or logistic")->capture_default_str();
  train_cmd->add_option("--scheme", scheme, "Sampling scheme: with or without")->capture_default_str();
  train_cmd->add_option("--C", train.cap, "Upper bound on the component gradient variance")->capture_default_str();
  train_cmd->add_flag("--auto-C", train.auto_cap, "Extension: C tracks the running max of the measured variance");
  train_cmd->add_option("--eps0", train.eps0, "First tolerance of the schedule")->capture_default_str();
  train_cmd->add_option("--rho", train.rho, "Geometric decay factor")->capture_default_str();
  train_cmd->add_option("--power", power, "Use eps0/(k+1)^p with this exponent instead of geometric decay");
  train_cmd->add_option("--alpha", train.alpha, "Learning rate")->capture_default_str();
  train_cmd->add_flag("--decaying", train.decaying, "Use alpha/(k+1) instead of a constant rate");
  train_cmd->add_option("--max-iters", train.max_iters, "Iteration limit")->capture_default_str();
  train_cmd->add_option("--tol", train.tol, "Stop when the monitored gradient norm is at most this")->capture_default_str();
  train_cmd->add_option("--monitor", train.monitor, "Stopping monitor: full or batch")->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Sampler seed")->capture_default_str();
  train_cmd->add_option("--out", train.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  if (*verify_cmd) return cmd_verify(verify, out, err);
  if (*growth_cmd) return cmd_growth_curve(growth, out, err);
  try {
    train.scheme = parse_scheme(scheme);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  train.power_exponent = power;
  return cmd_train(train, out, err);
}

}  // namespace batchsel::cli
