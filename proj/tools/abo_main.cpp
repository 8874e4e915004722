#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "abo/cli.hpp"
#include "abo/errors.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int workers = 0;
  long long seed_offset = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file (JSON)")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
  cmd->add_option("--workers", args.workers, "worker pool size (overrides config)");
  cmd->add_option("--seed-offset", args.seed_offset,
                  "added to every configured seed");
}

abo::ExperimentSpec load_spec(const CommonArgs& args) {
  abo::ExperimentSpec spec = abo::parse_config(args.config_path);
  if (!args.out_dir.empty()) spec.out_dir = args.out_dir;
  if (const char* env = std::getenv("ABO_OUT"); env && args.out_dir.empty())
    spec.out_dir = env;
  if (args.workers > 0) spec.workers = args.workers;
  if (const char* env = std::getenv("ABO_WORKERS"); env && args.workers == 0)
    spec.workers = std::max(1, std::atoi(env));
  if (args.seed_offset != 0)
    for (std::uint64_t& seed : spec.seeds)
      seed += static_cast<std::uint64_t>(args.seed_offset);
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive Bayesian optimization workbench"};
  app.require_subcommand(1);

  CommonArgs optimize_args, benchmark_args, sensitivity_args, report_args;
  std::string report_from;

  CLI::App* optimize = app.add_subcommand(
      "optimize", "run the configured optimizers and persist run histories");
  add_common(optimize, optimize_args);

  CLI::App* benchmark = app.add_subcommand(
      "benchmark", "run reference and challenger ensembles, emit WCRI tables");
  add_common(benchmark, benchmark_args);

  CLI::App* sensitivity = app.add_subcommand(
      "sensitivity", "variance-based sensitivity analysis on Saltelli designs");
  add_common(sensitivity, sensitivity_args);

  CLI::App* report = app.add_subcommand(
      "report", "recompute benchmark tables from persisted histories");
  add_common(report, report_args);
  report->add_option("--from", report_from,
                     "directory holding persisted runs (default: --out)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (optimize->parsed()) return abo::cmd_optimize(load_spec(optimize_args));
    if (benchmark->parsed()) return abo::cmd_benchmark(load_spec(benchmark_args));
    if (sensitivity->parsed())
      return abo::cmd_sensitivity(load_spec(sensitivity_args));
    if (report->parsed())
      return abo::cmd_report(load_spec(report_args), report_from);
  } catch (const abo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
