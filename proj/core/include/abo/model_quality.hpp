#pragma once

#include <vector>

#include "abo/gpr.hpp"

namespace abo {

/// Surrogate-quality scores: relative mean squared error (dimensionless,
/// equals 1 - R^2) and mean test log-likelihood of the predictive density.
struct QualityScore {
  double relmse = 0.0;
  double tll = 0.0;
};

/// MSE(y, y_hat) / Var(y) as a ratio of sums; y_true must be non-constant.
double relmse(const Eigen::Ref<const Vector>& y_true,
              const Eigen::Ref<const Vector>& y_pred);

/// Mean log predictive density over held-out points. Predicted variances are
/// floored at 1e-12 before the log so clamped posteriors stay finite.
double tll(const Doe& test, const Rpd& rpd);

/// The same score from explicit predictive means and variances.
double tll(const Eigen::Ref<const Vector>& y_true,
           const Eigen::Ref<const Vector>& means,
           const Eigen::Ref<const Vector>& variances);

/// RelMSE of per-row replicate means against the predictive mean; for noisy
/// objectives where single realizations are unreliable controls.
double replicate_mean_relmse(const Eigen::Ref<const Matrix>& test_X,
                             const std::vector<Vector>& replicates,
                             const Rpd& rpd);

/// True when b is preferred over a. RelMSE decides except inside the
/// good-enough zone (both below r_threshold), where the higher TLL wins;
/// exact RelMSE ties also defer to TLL. Ties throughout keep a.
bool prefers_second(const QualityScore& a, const QualityScore& b,
                    double r_threshold);

inline const QualityScore& prefer(const QualityScore& a, const QualityScore& b,
                                  double r_threshold) {
  return prefers_second(a, b, r_threshold) ? b : a;
}

}  // namespace abo
