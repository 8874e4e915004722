#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "abo/kernels.hpp"

namespace abo {

/// An objective evaluator over the unit cube. Instances need not be shareable
/// across threads; obtain one per run from an ObjectiveSource.
using ObjectiveFn = std::function<double(const Vector&)>;

/// Synthetic benchmark objective with its published unscaled domain; inputs
/// in [0,1]^D are mapped affinely onto it before evaluation.
struct SyntheticObjective {
  enum class Name { Sphere, AlpineN2 };
  Name name = Name::Sphere;
  int dim = 2;

  std::pair<double, double> domain() const;  // unscaled per-axis bounds
  /// A valid lower bound on the objective over the domain (used to shift
  /// curves positive for ratio statistics).
  double lower_bound() const;
  std::string label() const;
};

double objective_eval(const SyntheticObjective& objective,
                      const Eigen::Ref<const Vector>& u);

/// Factory handing out per-run evaluators, so external processes can be
/// spawned once per run while synthetic objectives stay shared and pure.
class ObjectiveSource {
 public:
  virtual ~ObjectiveSource() = default;
  virtual ObjectiveFn make() const = 0;
  virtual int dim() const = 0;
  virtual double lower_bound() const = 0;
  virtual std::string label() const = 0;
  /// Serial evaluators force single-worker execution.
  virtual bool serial() const { return false; }
};

std::shared_ptr<ObjectiveSource> make_synthetic_source(SyntheticObjective obj);

/// Analysis functions available to the sensitivity pipeline by name
/// (sphere, alpine_n2, ishigami); inputs on the unit cube.
struct AnalysisFunction {
  std::string name;
  int dim;
  ObjectiveFn fn;
};
AnalysisFunction analysis_function(const std::string& name, int dim);

/// Line-oriented bridge to an external simulator process: each evaluation
/// writes the D unit-cube coordinates space-separated on one line to the
/// child's stdin and reads back a single finite decimal scalar line.
class ExternalObjective {
 public:
  ExternalObjective(std::vector<std::string> argv, double timeout_seconds);
  ~ExternalObjective();
  ExternalObjective(const ExternalObjective&) = delete;
  ExternalObjective& operator=(const ExternalObjective&) = delete;

  double operator()(const Vector& u);

 private:
  void spawn();
  void shutdown();
  std::vector<std::string> argv_;
  double timeout_seconds_;
  int child_pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string read_buffer_;
};

std::shared_ptr<ObjectiveSource> make_external_source(
    std::vector<std::string> argv, int dim, double timeout_seconds,
    double lower_bound, bool serial);

}  // namespace abo
