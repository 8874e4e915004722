#include <doctest.h>

#include "abo/model_quality.hpp"
#include "abo/rng.hpp"

using namespace abo;

namespace {
Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}
}  // namespace

TEST_CASE("relmse worked values") {
  CHECK(relmse(vec({1, 2, 3}), vec({1, 2, 3})) == 0.0);
  CHECK(relmse(vec({0, 2}), vec({1, 1})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(relmse(vec({0, 2}), vec({0, 0})) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("relmse of the mean predictor is exactly one") {
  RngStream rng(4, "relmse");
  for (int trial = 0; trial < 10; ++trial) {
    Vector y(6);
    for (Index i = 0; i < 6; ++i) y(i) = rng.uniform(-5, 5);
    if ((y.array() - y.mean()).abs().maxCoeff() == 0.0) continue;
    Vector pred = Vector::Constant(6, y.mean());
    CHECK(relmse(y, pred) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("relmse is invariant under common affine transforms") {
  Vector y = vec({0.3, -1.2, 2.5, 0.9});
  Vector pred = vec({0.1, -1.0, 2.0, 1.2});
  const double base = relmse(y, pred);
  for (double a : {-2.0, 0.5, 3.0}) {
    Vector ty = a * y.array() + 4.2;
    Vector tp = a * pred.array() + 4.2;
    CHECK(relmse(ty, tp) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("relmse degenerate controls") {
  CHECK_THROWS_AS(relmse(vec({1, 1, 1}), vec({1, 2, 3})), DegenerateDataError);
  CHECK_THROWS_AS(relmse(vec({1}), vec({1})), DegenerateDataError);
}

TEST_CASE("tll worked values") {
  // single point, exact mean, unit variance
  CHECK(tll(vec({0.0}), vec({0.0}), vec({1.0})) ==
        doctest::Approx(-0.918939).epsilon(1e-6));
  CHECK(tll(vec({0.0}), vec({0.0}), vec({std::exp(1.0)})) ==
        doctest::Approx(-1.418939).epsilon(1e-6));
}

TEST_CASE("tll peaks at unit variance for unit residuals") {
  const Vector y = vec({1.0});
  const Vector mean = vec({0.0});
  const double at_one = tll(y, mean, vec({1.0}));
  for (double var : {0.25, 0.5, 2.0, 4.0}) {
    CHECK(tll(y, mean, vec({var})) < at_one);
  }
}

TEST_CASE("tll decreases as residuals grow") {
  double previous = tll(vec({0.0}), vec({0.0}), vec({1.0}));
  for (double resid : {0.5, 1.0, 2.0, 4.0}) {
    const double value = tll(vec({resid}), vec({0.0}), vec({1.0}));
    CHECK(value < previous);
    previous = value;
  }
}

TEST_CASE("tll floors clamped variances instead of diverging") {
  const double value = tll(vec({0.5}), vec({0.5}), vec({0.0}));
  CHECK(std::isfinite(value));
}

TEST_CASE("replicate means") {
  // interpolating fit: predictions at the training inputs equal y exactly
  Doe doe;
  doe.X.resize(2, 1);
  doe.X << 0.2, 0.8;
  doe.y.resize(2);
  doe.y << 1.0, 3.0;
  KernelSpec spec{KernelFamily::RBF, {1.0, 1.0, 0.0, 1.0}, {}};
  spec.fixed[2] = 1e-8;
  RngStream rng(6, "replicates");
  Rpd rpd = fit_mle(doe, spec, 4, rng);

  // replicates equal to the predictions row-wise
  std::vector<Vector> exact = {vec({1.0}), vec({3.0})};
  CHECK(replicate_mean_relmse(doe.X, exact, rpd) ==
        doctest::Approx(0.0).epsilon(1e-6));

  // single replicates reduce to plain relmse on the realizations
  std::vector<Vector> singles = {vec({0.0}), vec({2.0})};
  Vector preds(2);
  preds << rpd.predict(doe.X.row(0)).first, rpd.predict(doe.X.row(1)).first;
  CHECK(replicate_mean_relmse(doe.X, singles, rpd) ==
        doctest::Approx(relmse(vec({0.0, 2.0}), preds)).epsilon(1e-12));

  // two rows, replicate means (0, 2), predictions (1, 3) -> relmse 1 vs (1,1)?
  // use means (0, 2) against the interpolated predictions (1, 3):
  // relmse = ((0-1)^2 + (2-3)^2) / ((0-1)^2 + (2-1)^2) = 1
  std::vector<Vector> shifted = {vec({0.0}), vec({2.0})};
  CHECK(replicate_mean_relmse(doe.X, shifted, rpd) ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("preference rule") {
  const double r = 0.05;
  QualityScore a{0.10, -1.0}, b{0.30, +1.0};
  CHECK(&prefer(a, b, r) == &a);  // both above threshold: min RelMSE wins

  QualityScore c{0.01, -1.0}, d{0.02, +1.0};
  CHECK(&prefer(c, d, r) == &d);  // both below: TLL breaks the tie

  QualityScore e{0.10, 0.0}, f{0.10, 1.0};
  CHECK(&prefer(e, f, r) == &f);  // equal RelMSE: higher TLL

  QualityScore g{0.10, 1.0}, h{0.10, 1.0};
  CHECK(&prefer(g, h, r) == &g);  // full tie keeps the first
}
