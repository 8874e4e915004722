#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "abo/kernels.hpp"
#include "abo/rng.hpp"

namespace abo {

/// Median of nearest-neighbor distances within the rows of U (N >= 2); even
/// counts take the midpoint of the two central order statistics.
double mmd(const Eigen::Ref<const Matrix>& U);

/// Minimal Euclidean distance between x and any row of X.
double d_min(const Eigen::Ref<const Vector>& x,
             const Eigen::Ref<const Matrix>& X);

/// ln(MMD(X) / d_min(x, X)): large positive means x crowds the evaluated
/// designs, negative means it explores. +inf when x duplicates a row.
double exploitation_score(const Eigen::Ref<const Vector>& x,
                          const Eigen::Ref<const Matrix>& X);

/// A candidate design produced by one acquisition of the portfolio.
struct Candidate {
  Vector x;
  int acq_index = 0;
  double es = std::numeric_limits<double>::quiet_NaN();
};

/// Keeps candidates with exploitation score <= threshold (scores are
/// stamped onto the candidates); if nothing survives, the filter is skipped
/// and all candidates return. Never returns an empty set.
std::vector<Candidate> filter_candidates(std::vector<Candidate> candidates,
                                         const Eigen::Ref<const Matrix>& X_prev,
                                         double threshold);

/// Per-acquisition success counts for the categorical selection strategy;
/// counts start at one so no acquisition is ever starved.
struct CatState {
  std::vector<int> counts;
  std::optional<int> last_selected;

  static CatState uniform(int n_acquisitions);
  int total() const;
  std::vector<double> probabilities() const;  // n_a / N
};

/// Uniform choice among candidates; a single candidate is returned without
/// consuming a draw.
std::size_t sel_uniform(const std::vector<Candidate>& candidates,
                        RngStream& rng);

/// Categorical choice with probabilities n_a / N restricted to the surviving
/// candidates' acquisition indices and renormalized.
std::size_t sel_cat(const std::vector<Candidate>& candidates,
                    const CatState& state, RngStream& rng);

/// Count update: the selected acquisition's count grows by one exactly when
/// its design achieved the running minimum (ties included).
CatState cat_update(CatState state, int selected, bool improved);

/// Per-iteration exploitation-score thresholds: explicit values or a linear
/// ramp; iterations beyond the schedule hold the final value.
class EsSchedule {
 public:
  static EsSchedule linear(double start, double end, int length);
  static EsSchedule constant(double value);
  static EsSchedule explicit_values(std::vector<double> values);

  /// Threshold for 1-based iteration i.
  double at(int i) const;

  double start() const { return start_; }
  double end() const { return end_; }
  int length() const { return length_; }
  bool is_explicit() const { return !values_.empty(); }
  const std::vector<double>& values() const { return values_; }

 private:
  double start_ = 0.5;
  double end_ = 2.0;
  int length_ = 0;
  std::vector<double> values_;
};

}  // namespace abo
