#include "abo/model_quality.hpp"

#include <cmath>

namespace abo {

double relmse(const Eigen::Ref<const Vector>& y_true,
              const Eigen::Ref<const Vector>& y_pred) {
  if (y_true.size() != y_pred.size())
    throw DimensionError("control and prediction vectors differ in length");
  if (y_true.size() < 2)
    throw DegenerateDataError("relmse needs at least two control values");
  const double mean = y_true.mean();
  const double denom = (y_true.array() - mean).square().sum();
  if (denom == 0.0)
    throw DegenerateDataError("relmse is undefined for constant controls");
  const double num = (y_true - y_pred).squaredNorm();
  return num / denom;
}

double tll(const Eigen::Ref<const Vector>& y_true,
           const Eigen::Ref<const Vector>& means,
           const Eigen::Ref<const Vector>& variances) {
  if (y_true.size() != means.size() || y_true.size() != variances.size())
    throw DimensionError("tll inputs differ in length");
  if (y_true.size() < 1) throw DegenerateDataError("tll over no test points");
  constexpr double log_2pi = 1.8378770664093454836;
  constexpr double var_floor = 1e-12;
  double acc = 0.0;
  for (Index j = 0; j < y_true.size(); ++j) {
    const double var = std::max(variances(j), var_floor);
    const double resid = y_true(j) - means(j);
    acc += 0.5 * (std::log(var) + resid * resid / var);
  }
  return -0.5 * log_2pi - acc / static_cast<double>(y_true.size());
}

double tll(const Doe& test, const Rpd& rpd) {
  test.validate();
  if (test.dim() != rpd.dim())
    throw DimensionError("test design dimension mismatch");
  Vector means(test.n()), variances(test.n());
  for (Index j = 0; j < test.n(); ++j) {
    auto [mu, var] = rpd.predict(test.X.row(j));
    means(j) = mu;
    variances(j) = var;
  }
  return tll(test.y, means, variances);
}

double replicate_mean_relmse(const Eigen::Ref<const Matrix>& test_X,
                             const std::vector<Vector>& replicates,
                             const Rpd& rpd) {
  if (static_cast<std::size_t>(test_X.rows()) != replicates.size())
    throw DimensionError("one replicate vector required per test row");
  const Index m = test_X.rows();
  Vector means(m), preds(m);
  for (Index j = 0; j < m; ++j) {
    const Vector& reps = replicates[static_cast<std::size_t>(j)];
    if (reps.size() < 1)
      throw DegenerateDataError("each test row needs at least one replicate");
    means(j) = reps.mean();
    preds(j) = rpd.predict(test_X.row(j)).first;
  }
  return relmse(means, preds);
}

bool prefers_second(const QualityScore& a, const QualityScore& b,
                    double r_threshold) {
  if (a.relmse < r_threshold && b.relmse < r_threshold) {
    return b.tll > a.tll;
  }
  if (b.relmse != a.relmse) return b.relmse < a.relmse;
  return b.tll > a.tll;
}

}  // namespace abo
