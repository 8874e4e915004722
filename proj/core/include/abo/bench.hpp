#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "abo/objectives.hpp"
#include "abo/optimizer.hpp"

namespace abo {

/// All runs of one optimizer configuration across seeds.
struct RunEnsemble {
  OptimizerConfig config;
  std::string objective_label;
  std::vector<std::uint64_t> seeds;
  std::vector<RunHistory> histories;

  std::string digest_hex() const;
};

/// Incumbent minima of a run at iterations 1..I.
Vector incumbent_curve(const RunHistory& history);

/// Five-number summary (min, Q1, median, Q3, max) of incumbent minima per
/// iteration across the ensemble's complete runs; 5 x I, rows ordered q0..q4.
/// Quantiles use linear interpolation of order statistics.
Matrix quartile_curves(const RunEnsemble& ensemble);
Matrix quartile_curves(const std::vector<RunHistory>& histories, int iterations);

/// Quantile with the linear interpolation convention, p in [0, 1].
double quantile_linear(std::vector<double> values, double p);

struct EnsembleOptions {
  int init_samples = 16;
  bool shared_init = true;
  int workers = 4;
  std::string out_dir;  // when set, persists one file per run plus an index
};

/// Runs every (config, seed) pair on a fixed-size worker pool; results are
/// merged by task order regardless of completion order. With shared_init all
/// configs at a given seed receive bit-identical initial designs (Sobol'
/// block selected by a seed-dependent skip). Individual run failures are
/// recorded on their histories and the ensemble continues.
std::vector<RunEnsemble> run_ensemble(const ObjectiveSource& objective,
                                      const std::vector<OptimizerConfig>& configs,
                                      const std::vector<std::uint64_t>& seeds,
                                      const EnsembleOptions& options);

/// One-file-per-run history persistence (delimited text, full precision).
void save_history(std::ostream& out, const RunHistory& history,
                  const OptimizerConfig& config, std::uint64_t seed,
                  const std::string& objective_label);

struct SavedRun {
  std::string config_digest;
  std::string label;
  std::string variant;
  std::string objective_label;
  std::uint64_t seed = 0;
  RunHistory history;
};

SavedRun load_history(std::istream& in);

/// Index file mapping ensembles to their run files.
void save_ensemble_index(std::ostream& out,
                         const std::vector<RunEnsemble>& ensembles,
                         const std::vector<std::string>& run_files);

/// File name convention for one run: <digest>_<seed>.tsv under runs/.
std::string run_file_name(const OptimizerConfig& config, std::uint64_t seed);

}  // namespace abo
