#pragma once

#include <string>
#include <vector>

#include "abo/objectives.hpp"
#include "abo/rng.hpp"
#include "abo/sampling.hpp"

namespace abo {

/// First-order and total-order variance-based sensitivity indices with
/// optional bootstrap confidence bounds (NaN until computed).
struct SensitivityReport {
  Index n_base = 0;
  Vector s1, st;
  Vector s1_low, s1_high, st_low, st_high;
  double ci_level = 0.0;
};

/// Estimates S1 via the Saltelli-2010 form and ST via the Jansen form over
/// the design's (A, B, AB_i) blocks; outputs are centered on mean(A u B) so
/// the ratio estimators are exactly invariant under affine output transforms.
/// y must hold one value per design row, in row order.
SensitivityReport sobol_indices(const SaltelliDesign& design, const Vector& y);

/// Percentile bootstrap over jointly resampled base-sample indices; fills the
/// report's CI bounds. Deterministic given the stream.
void bootstrap_ci(SensitivityReport& report, const SaltelliDesign& design,
                  const Vector& y, double level, int resamples, RngStream& rng);

struct ConvergenceOptions {
  double ci_level = 0.95;
  int bootstrap_resamples = 1000;
  std::uint64_t seed = 0;
};

/// One report per base-sample count, each on a freshly constructed design
/// with the objective evaluated over all rows.
std::vector<SensitivityReport> convergence_curve(
    const ObjectiveFn& objective, int dim, const std::vector<Index>& n_bases,
    const ConvergenceOptions& options = {});

/// One row per parameter: name, S1, S1 bounds, ST, ST bounds.
std::string serialize_report(const SensitivityReport& report,
                             const std::vector<std::string>& names,
                             char delimiter);

}  // namespace abo
