#pragma once

#include <memory>
#include <string>
#include <vector>

#include "abo/bench.hpp"
#include "abo/sensitivity.hpp"

namespace abo {

enum class ExperimentMode { Optimize, Benchmark, Sensitivity };

/// A named group of optimizer configurations compared against the reference
/// set in benchmark mode.
struct ChallengerGroup {
  std::string label;
  std::vector<OptimizerConfig> configs;
};

/// Fully validated experiment description; the unit of work for every
/// subcommand.
struct ExperimentSpec {
  ExperimentMode mode = ExperimentMode::Optimize;
  std::shared_ptr<ObjectiveSource> objective;
  std::string objective_name;  // registry name for sensitivity mode
  std::vector<OptimizerConfig> optimizers;      // optimize mode
  std::vector<OptimizerConfig> reference;       // benchmark mode
  std::vector<ChallengerGroup> challengers;     // benchmark mode
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  int init_samples = 16;
  int iterations = 50;
  int workers = 4;
  char delimiter = '\t';
  std::string out_dir = "out";
  double wcri_shift = 0.0;  // derived from the objective's lower bound
  std::vector<Index> sensitivity_ng = {256, 512, 1024};
  int bootstrap_resamples = 1000;
  double ci_level = 0.95;
};

/// Parses and validates a JSON experiment file. Unknown keys are rejected
/// and every error names the offending field. Throws ConfigError.
ExperimentSpec parse_config(const std::string& path);
ExperimentSpec parse_config_text(const std::string& text,
                                 const std::string& origin = "<config>");

/// The nine-config standard reference set: three kernel families crossed
/// with {LogEI, LogPI, UCB}.
std::vector<OptimizerConfig> standard_reference_configs(int iterations);

/// Subcommand drivers; each returns a process exit status (0 success,
/// 1 when any run aborted). Outputs land under spec.out_dir.
int cmd_optimize(const ExperimentSpec& spec);
int cmd_benchmark(const ExperimentSpec& spec);
int cmd_sensitivity(const ExperimentSpec& spec);
/// Recomputes benchmark tables from histories persisted by cmd_benchmark.
int cmd_report(const ExperimentSpec& spec, const std::string& from_dir);

}  // namespace abo
