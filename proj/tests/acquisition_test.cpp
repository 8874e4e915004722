#include <doctest.h>

#include <cmath>

#include "abo/acquisition.hpp"
#include "abo/sampling.hpp"
#include "oracles.hpp"

using namespace abo;

namespace {

Rpd fit_sphere_rpd(int n, int dim, std::uint64_t seed) {
  Doe doe;
  doe.X = sobol_points(dim, n);
  doe.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Index d = 0; d < dim; ++d) {
      const double x = -5.0 + 10.0 * doe.X(i, d);
      acc += x * x;
    }
    doe.y(i) = acc;
  }
  KernelSpec spec{KernelFamily::Matern32, {1.0, 1.0, 0.01, 1.0}, {}};
  RngStream rng(seed, "acq-fit");
  return fit_mle(doe, spec, 4, rng);
}

}  // namespace

TEST_CASE("worked belief values") {
  Acquisition ei{AcquisitionKind::EI, 2.0};
  CHECK(acq_value(ei, 0.0, 1.0, 0.0) ==
        doctest::Approx(0.3989422804).epsilon(1e-6));

  Acquisition pi{AcquisitionKind::PI, 2.0};
  CHECK(acq_value(pi, 0.0, 2.5, 0.0) == doctest::Approx(0.5));

  Acquisition ucb{AcquisitionKind::UCB, 2.0};
  CHECK(acq_value(ucb, 1.0, 0.5, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("zero-sigma limits") {
  Acquisition ei{AcquisitionKind::EI, 2.0};
  CHECK(acq_value(ei, 1.0, 0.0, 3.0) == 2.0);
  CHECK(acq_value(ei, 5.0, 0.0, 3.0) == 0.0);
  Acquisition pi{AcquisitionKind::PI, 2.0};
  CHECK(acq_value(pi, 1.0, 0.0, 3.0) == 1.0);
  CHECK(acq_value(pi, 5.0, 0.0, 3.0) == 0.0);
  Acquisition logei{AcquisitionKind::LogEI, 2.0};
  CHECK(acq_value(logei, 5.0, 0.0, 3.0) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("expected improvement is non-negative and grows with sigma") {
  Acquisition ei{AcquisitionKind::EI, 2.0};
  for (double z = -30.0; z <= 8.0; z += 0.37) {
    CHECK(acq_value(ei, -z, 1.0, 0.0) >= 0.0);
  }
  double previous = 0.0;
  for (double sigma : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    const double value = acq_value(ei, -1.0, sigma, 0.0);  // mean below incumbent
    CHECK(value > previous);
    previous = value;
  }
}

TEST_CASE("log variants agree with the log of the plain values") {
  Acquisition ei{AcquisitionKind::EI, 2.0};
  Acquisition logei{AcquisitionKind::LogEI, 2.0};
  Acquisition pi{AcquisitionKind::PI, 2.0};
  Acquisition logpi{AcquisitionKind::LogPI, 2.0};
  for (double z = -36.0; z <= 8.0; z += 0.193) {
    const double plain = acq_value(ei, -z, 1.0, 0.0);
    if (plain > 1e-300) {
      CHECK(std::abs(acq_value(logei, -z, 1.0, 0.0) - std::log(plain)) < 1e-6);
    }
    const double pi_plain = acq_value(pi, -z, 1.0, 0.0);
    if (pi_plain > 1e-300) {
      CHECK(std::abs(acq_value(logpi, -z, 1.0, 0.0) - std::log(pi_plain)) < 1e-6);
    }
  }
  // continuity across the asymptotic branch switch at z = -6
  CHECK(detail::log_ei_term(-6.0 - 1e-9) ==
        doctest::Approx(detail::log_ei_term(-6.0 + 1e-9)).epsilon(1e-7));
  CHECK(detail::log_norm_cdf(-6.0 - 1e-9) ==
        doctest::Approx(detail::log_norm_cdf(-6.0 + 1e-9)).epsilon(1e-7));
}

TEST_CASE("probability of improvement is a cdf in z") {
  Acquisition pi{AcquisitionKind::PI, 2.0};
  double previous = -1.0;
  for (double z = -10.0; z <= 10.0; z += 0.25) {
    const double value = acq_value(pi, -z, 1.0, 0.0);
    CHECK(value >= 0.0);
    CHECK(value <= 1.0);
    CHECK(value >= previous);
    previous = value;
  }
}

TEST_CASE("maximizer beats every seed point") {
  Rpd rpd = fit_sphere_rpd(8, 1, 21);
  const double incumbent = 1.0;
  Acquisition acq{AcquisitionKind::LogEI, 2.0};
  AcqBudget budget;

  RngStream rng(77, "maximize");
  Vector best = acq_maximize(acq, rpd, incumbent, budget, rng);
  const double best_value = acq_eval(acq, rpd, best, incumbent);

  // replay the documented seed offset draw to recover the evaluation grid
  RngStream replay(77, "maximize");
  const std::uint64_t skip = replay.next_u64() & ((1ULL << 20) - 1);
  Matrix seeds = sobol_points(1, budget.seed_count, skip);
  for (Index i = 0; i < seeds.rows(); ++i) {
    CHECK(best_value >= acq_eval(acq, rpd, seeds.row(i), incumbent) - 1e-12);
  }
}

TEST_CASE("zero-beta confidence bound reduces to mean minimization") {
  Rpd rpd = fit_sphere_rpd(10, 2, 22);
  Acquisition ucb{AcquisitionKind::UCB, 0.0};
  AcqBudget budget;
  RngStream rng(78, "ucb0");
  Vector best = acq_maximize(ucb, rpd, 1.0, budget, rng);

  RngStream replay(78, "ucb0");
  const std::uint64_t skip = replay.next_u64() & ((1ULL << 20) - 1);
  Matrix seeds = sobol_points(2, budget.seed_count, skip);
  double grid_min = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < seeds.rows(); ++i)
    grid_min = std::min(grid_min, rpd.predict(seeds.row(i)).first);
  CHECK(rpd.predict(best).first <= grid_min + 1e-9);
}

TEST_CASE("maximization is deterministic given the stream") {
  Rpd rpd = fit_sphere_rpd(8, 2, 23);
  Acquisition acq{AcquisitionKind::LogPI, 2.0};
  AcqBudget budget;
  RngStream a(5, "det");
  RngStream b(5, "det");
  Vector xa = acq_maximize(acq, rpd, 2.0, budget, a);
  Vector xb = acq_maximize(acq, rpd, 2.0, budget, b);
  CHECK(xa == xb);
}

TEST_CASE("ei and logei land on the same landscape peak") {
  Rpd rpd = fit_sphere_rpd(10, 2, 24);
  const double incumbent = rpd.standardized_doe().y.minCoeff() * rpd.y_std() +
                           rpd.y_mean();
  AcqBudget budget;
  RngStream a(9, "argmax");
  RngStream b(9, "argmax");
  Vector x_ei = acq_maximize({AcquisitionKind::EI, 2.0}, rpd, incumbent, budget, a);
  Vector x_logei =
      acq_maximize({AcquisitionKind::LogEI, 2.0}, rpd, incumbent, budget, b);
  const double ei_at_ei = acq_eval({AcquisitionKind::EI, 2.0}, rpd, x_ei, incumbent);
  const double ei_at_log =
      acq_eval({AcquisitionKind::EI, 2.0}, rpd, x_logei, incumbent);
  CHECK(std::abs(ei_at_ei - ei_at_log) <=
        1e-6 * std::max(std::abs(ei_at_ei), std::abs(ei_at_log)));
}

TEST_CASE("beta validation") {
  Acquisition bad{AcquisitionKind::UCB, -1.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  Acquisition zero{AcquisitionKind::UCB, 0.0};
  CHECK_NOTHROW(zero.validate());
}
