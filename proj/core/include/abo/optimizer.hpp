#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abo/acquisition.hpp"
#include "abo/gpi.hpp"
#include "abo/objectives.hpp"
#include "abo/selection.hpp"

namespace abo {

enum class Variant { BO, BO_GPi, BO_Ada, BO_iAda, BO_GPi_Ada, BO_GPi_iAda };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);
bool variant_uses_gpi(Variant v);
bool variant_uses_portfolio(Variant v);  // acquisition set + selection
bool variant_uses_es_filter(Variant v);

enum class SelectionStrategy { Uniform, Categorical };

/// When the kernel / domain search re-runs during an adaptive loop.
struct GpiCondition {
  enum class Mode { Periodic, OnStagnation, Never };
  Mode mode = Mode::Periodic;
  int period = 25;       // events at i = 1, 1+period, ...
  int stagnation = 10;   // re-run after this many non-improving iterations

  bool due(int iteration, int last_event, int since_improvement) const;
  static GpiCondition periodic(int period);
  static GpiCondition on_stagnation(int k);
  static GpiCondition never();
};

struct OptimizerConfig {
  Variant variant = Variant::BO;
  KernelSpec kernel;                     // fixed-kernel variants
  std::vector<Acquisition> acquisitions = {{AcquisitionKind::LogEI, 2.0}};
  SelectionStrategy selection = SelectionStrategy::Uniform;
  GpiConfig gpi;
  GpiCondition gpi_condition;
  EsSchedule es_schedule = EsSchedule::linear(0.5, 2.0, 50);
  AcqBudget acq_budget;
  int iterations = 50;
  std::uint64_t seed = 0;
  std::string label;  // report label; derived from settings when empty

  void validate() const;
  std::string display_label() const;
  /// Canonical text form of every behavior-relevant field; basis of digests.
  std::string canonical_string() const;
  std::uint64_t digest() const;
};

struct IterationRecord {
  Vector x;
  double y = 0.0;
  double incumbent = 0.0;
  int acq_index = 0;
  bool gpi_event = false;
  std::vector<double> candidate_es;  // per portfolio candidate; empty if unused
};

struct RunHistory {
  Doe initial;  // all designs known before the first iteration
  std::vector<IterationRecord> records;
  Vector x_rec;
  double y_rec = 0.0;
  bool aborted = false;
  std::string abort_reason;

  double initial_min() const { return initial.y.minCoeff(); }
  int iterations_completed() const { return static_cast<int>(records.size()); }
};

/// Best observed design across the initial Doe and all iterations; ties go
/// to the earliest observation.
std::pair<Vector, double> recommend(const RunHistory& history);

/// Standard Bayesian optimization: fit the fixed kernel, maximize the single
/// acquisition, evaluate, append; I iterations.
RunHistory run_bo(const ObjectiveFn& objective, const Doe& initial,
                  const OptimizerConfig& config);

/// The adaptive loop. For kernel-searching variants the held-out `test`
/// design seeds the first search event; later events re-split the full
/// current data. Non-searching variants may pass an empty test design.
RunHistory run_adaptive_bo(const ObjectiveFn& objective, const Doe& initial,
                           const Doe& test, const OptimizerConfig& config);

}  // namespace abo
