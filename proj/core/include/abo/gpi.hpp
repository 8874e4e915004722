#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "abo/model_quality.hpp"

namespace abo {

struct NominalValues {
  double low = 0.0;
  double mid = 0.0;
  double high = 0.0;

  /// Geometric low / midpoint / high of a parameter's bound interval.
  static NominalValues geometric(ParamKind kind);
};

/// Configuration of the breadth-first kernel / restricted-domain search.
struct GpiConfig {
  std::vector<KernelFamily> kernel_set = {
      KernelFamily::RBF, KernelFamily::Matern32, KernelFamily::RQ};
  int max_fixture_depth = 2;  // number of simultaneously fixed parameters
  std::array<NominalValues, 4> nominals = {
      NominalValues::geometric(ParamKind::C),
      NominalValues::geometric(ParamKind::Lambda),
      NominalValues::geometric(ParamKind::S2),
      NominalValues::geometric(ParamKind::Alpha)};
  int trial_threshold = 20;       // Q: fitted trials before giving up
  double relmse_threshold = 0.05;  // R: accept zone and early-stop level
  double test_fraction = 0.2;
  FitOptions fit;

  void validate() const;
};

struct GpiResult {
  KernelSpec spec;  // winning family, fixture mask, fitted parameters
  QualityScore score;
  int trials_used = 0;
  std::shared_ptr<const Rpd> rpd;  // the winning fitted surrogate
};

/// Deterministic trial order: the unrestricted domains first (one per family,
/// in kernel_set order), then depth d = 1, 2, ...: families in order, fixture
/// index sets in lexicographic order, nominal values cycling fastest in the
/// first fixed coordinate.
std::vector<KernelSpec> enumerate_rlds(const GpiConfig& config);

/// Fits each enumerated domain on `train`, scores on `test` (RelMSE of the
/// predictive mean, TLL of the density), keeps the best under the preference
/// rule, and stops early once the best RelMSE drops below the threshold or
/// the trial budget is spent. `warm_start`, when given, is refitted as trial
/// one ahead of the enumeration (and skipped inside it).
GpiResult gpi_search(const Doe& train, const Doe& test, const GpiConfig& config,
                     RngStream& rng,
                     const std::optional<KernelSpec>& warm_start = {});

/// Disjoint split with |test| = floor(fraction * N); deterministic given the
/// stream. Row order within each part follows the original design.
std::pair<Doe, Doe> split_train_test(const Doe& doe, double fraction,
                                     RngStream& rng);

}  // namespace abo
