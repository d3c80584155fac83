// ssesprit: Monte Carlo simulation, analytic prediction and single-source
// design tables for spatially smoothed R-D ESPRIT-type estimators.
//
// Exit codes: 0 success, 1 config error, 2 failure budget exceeded.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ssesprit/harness/config.hpp"
#include "ssesprit/harness/design_table.hpp"
#include "ssesprit/harness/experiment.hpp"

namespace {

namespace h = ssesprit::harness;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kBudgetExceeded = 2;

void report_point(const h::PointResult& p) {
  std::cerr << "  sweep " << h::format_value(p.sweep_value) << ':';
  for (const auto& v : p.variants) {
    std::cerr << ' ' << v.variant << '=' << h::format_value(v.rmse_emp);
    if (v.failures) std::cerr << " (" << v.failures << " failed)";
  }
  std::cerr << '\n';
}

bool write_report(const h::RmseReport& report, const std::string& path) {
  if (path.empty() || path == "-") {
    h::write_csv(std::cout, report);
    return true;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return false;
  }
  h::write_csv(out, report);
  return static_cast<bool>(out);
}

int simulate(const std::string& config_path, std::string out_path, std::optional<int> trials,
             std::optional<std::uint64_t> seed, std::optional<int> threads) {
  h::ExperimentConfig cfg = h::load_config(config_path);
  if (trials) cfg.trials = *trials;
  if (seed) cfg.seed = *seed;
  if (threads) cfg.threads = *threads;
  cfg.validate();
  if (out_path.empty()) out_path = cfg.output;

  std::cerr << "simulate: " << cfg.points() << " points x " << cfg.trials << " trials, seed " << cfg.seed << '\n';
  const auto report = h::run_experiment(cfg, report_point);
  if (!write_report(report, out_path)) return kConfigError;

  const double worst = report.worst_failure_rate();
  if (worst > cfg.failure_budget) {
    std::cerr << "error: failure rate " << worst << " exceeds budget " << cfg.failure_budget << '\n';
    return kBudgetExceeded;
  }
  return kOk;
}

int predict(const std::string& config_path, const std::string& out_path, std::optional<int> trials) {
  h::ExperimentConfig cfg = h::load_config(config_path);
  if (trials) cfg.trials = *trials;
  cfg.validate();
  const auto report = h::run_prediction(cfg);
  return write_report(report, out_path) ? kOk : kConfigError;
}

int design_table(const std::string& spec, const std::string& out_path) {
  const auto rows = h::run_design_table(h::parse_geometry_spec(spec));
  if (out_path.empty() || out_path == "-") {
    h::write_design_csv(std::cout, rows);
    return kOk;
  }
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    return kConfigError;
  }
  h::write_design_csv(out, rows);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatially smoothed R-D ESPRIT: simulation and performance analysis"};
  app.require_subcommand(1);

  std::string config, out, geometry;
  std::optional<int> trials, threads;
  std::optional<std::uint64_t> seed;

  auto* sim = app.add_subcommand("simulate", "Monte Carlo RMSE sweep with analytic and CRB columns");
  sim->add_option("--config", config, "Experiment config file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out, "Output CSV ('-' for stdout; default: config 'output')");
  sim->add_option("--trials", trials, "Override trial count")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "Override master seed");
  sim->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* pred = app.add_subcommand("predict", "Analytic RMSE and CRB only, no estimation");
  pred->add_option("--config", config, "Experiment config file")->required()->check(CLI::ExistingFile);
  pred->add_option("--out", out, "Output CSV (default: stdout)");
  pred->add_option("--trials", trials, "Override the number of symbol draws")->check(CLI::PositiveNumber);

  auto* design = app.add_subcommand("design-table", "Single-source L_opt, gain, CRB and efficiency per geometry");
  design->add_option("--geometry", geometry, "e.g. 3..60, 6x6,4x4x4 or 3..12:2")->required();
  design->add_option("--out", out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*sim) return simulate(config, out, trials, seed, threads);
    if (*pred) return predict(config, out, trials);
    return design_table(geometry, out);
  } catch (const ssesprit::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}
