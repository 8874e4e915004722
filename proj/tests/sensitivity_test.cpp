#include <doctest.h>

#include <cmath>

#include "abo/objectives.hpp"
#include "abo/sensitivity.hpp"
#include "oracles.hpp"

using namespace abo;

namespace {

Vector evaluate_rows(const SaltelliDesign& design, const ObjectiveFn& f) {
  Vector y(design.rows.rows());
  for (Index r = 0; r < design.rows.rows(); ++r) y(r) = f(design.rows.row(r));
  return y;
}

const ObjectiveFn first_coordinate = [](const Vector& u) { return u(0); };

}  // namespace

TEST_CASE("single-variable function attributes everything to x1") {
  SaltelliDesign design = saltelli_design(3, 1024);
  Vector y = evaluate_rows(design, first_coordinate);
  SensitivityReport report = sobol_indices(design, y);
  CHECK(std::abs(report.s1(0) - 1.0) < 0.03);
  CHECK(std::abs(report.s1(1)) < 0.03);
  CHECK(std::abs(report.s1(2)) < 0.03);
  CHECK(std::abs(report.st(0) - 1.0) < 0.03);
  CHECK(std::abs(report.st(1)) < 0.03);
  CHECK(std::abs(report.st(2)) < 0.03);
}

TEST_CASE("ishigami indices match the analytic values") {
  AnalysisFunction ishigami = analysis_function("ishigami", 3);
  SaltelliDesign design = saltelli_design(3, 1024);
  Vector y = evaluate_rows(design, ishigami.fn);
  SensitivityReport report = sobol_indices(design, y);

  auto exact = oracles::ishigami_analytic();
  CHECK(std::abs(report.s1(0) - exact.s1_1) < 0.05);
  CHECK(std::abs(report.s1(1) - exact.s1_2) < 0.05);
  CHECK(std::abs(report.s1(2) - exact.s1_3) < 0.05);
  CHECK(report.st(2) > 0.2);          // x3 acts only through interaction
  CHECK(report.st(2) > report.s1(2));
}

TEST_CASE("additive functions split variance cleanly") {
  const ObjectiveFn additive = [](const Vector& u) {
    return u(0) + 2.0 * u(1);
  };
  SaltelliDesign design = saltelli_design(2, 1024);
  Vector y = evaluate_rows(design, additive);
  SensitivityReport report = sobol_indices(design, y);
  const double sum = report.s1.sum();
  CHECK(sum > 0.9);
  CHECK(sum < 1.1);
  for (Index i = 0; i < 2; ++i) {
    CHECK(std::abs(report.s1(i) - report.st(i)) < 0.05);
    CHECK(report.st(i) >= report.s1(i) - 0.05);
  }
}

TEST_CASE("estimates are exactly invariant under affine output transforms") {
  AnalysisFunction ishigami = analysis_function("ishigami", 3);
  SaltelliDesign design = saltelli_design(3, 256);
  Vector y = evaluate_rows(design, ishigami.fn);
  SensitivityReport base = sobol_indices(design, y);
  Vector transformed = -2.5 * y.array() + 11.0;
  SensitivityReport moved = sobol_indices(design, transformed);
  for (Index i = 0; i < 3; ++i) {
    CHECK(moved.s1(i) == doctest::Approx(base.s1(i)).epsilon(1e-12));
    CHECK(moved.st(i) == doctest::Approx(base.st(i)).epsilon(1e-12));
  }
}

TEST_CASE("constant outputs are rejected") {
  SaltelliDesign design = saltelli_design(2, 16);
  Vector y = Vector::Constant(design.rows.rows(), 3.0);
  CHECK_THROWS_AS(sobol_indices(design, y), DegenerateDataError);
}

TEST_CASE("bootstrap intervals bracket tightly at large designs") {
  SaltelliDesign design = saltelli_design(3, 1024);
  Vector y = evaluate_rows(design, first_coordinate);
  SensitivityReport report = sobol_indices(design, y);
  RngStream rng(3, "boot");
  bootstrap_ci(report, design, y, 0.95, 1000, rng);
  CHECK(report.s1_high(0) - report.s1_low(0) < 0.1);
  CHECK(report.s1_low(0) <= report.s1(0));
  CHECK(report.s1(0) <= report.s1_high(0));
}

TEST_CASE("bootstrap is seed-deterministic and resample-stable") {
  SaltelliDesign design = saltelli_design(3, 256);
  AnalysisFunction ishigami = analysis_function("ishigami", 3);
  Vector y = evaluate_rows(design, ishigami.fn);

  SensitivityReport a = sobol_indices(design, y);
  SensitivityReport b = sobol_indices(design, y);
  RngStream ra(9, "boot"), rb(9, "boot");
  bootstrap_ci(a, design, y, 0.95, 200, ra);
  bootstrap_ci(b, design, y, 0.95, 200, rb);
  CHECK(a.s1_low == b.s1_low);
  CHECK(a.st_high == b.st_high);

  // resample count does not move the point estimates, widths stay comparable
  SensitivityReport few = sobol_indices(design, y);
  SensitivityReport many = sobol_indices(design, y);
  RngStream rf(11, "boot"), rm(11, "boot-more");
  bootstrap_ci(few, design, y, 0.95, 100, rf);
  bootstrap_ci(many, design, y, 0.95, 1000, rm);
  CHECK(few.s1 == many.s1);
  for (Index i = 0; i < 3; ++i) {
    const double wf = few.s1_high(i) - few.s1_low(i);
    const double wm = many.s1_high(i) - many.s1_low(i);
    CHECK(wf < wm * 1.3 + 1e-12);
    CHECK(wf > wm * 0.7 - 1e-12);
  }
}

TEST_CASE("bootstrap rejects bad arguments") {
  SaltelliDesign design = saltelli_design(2, 16);
  Vector y = evaluate_rows(design, first_coordinate);
  SensitivityReport report = sobol_indices(design, y);
  RngStream rng(1, "boot");
  CHECK_THROWS_AS(bootstrap_ci(report, design, y, 0.95, 50, rng), ConfigError);
  CHECK_THROWS_AS(bootstrap_ci(report, design, y, 1.5, 200, rng), ConfigError);
}

TEST_CASE("convergence curves tighten") {
  ConvergenceOptions options;
  options.bootstrap_resamples = 0;
  auto reports = convergence_curve(first_coordinate, 3, {256, 512, 1024}, options);
  REQUIRE(reports.size() == 3);
  const double err_mid = std::abs(reports[1].s1(0) - 1.0);
  const double err_last = std::abs(reports[2].s1(0) - 1.0);
  CHECK(err_last <= err_mid + 1e-12);

  auto single = convergence_curve(first_coordinate, 3, {128}, options);
  CHECK(single.size() == 1);

  auto rerun = convergence_curve(first_coordinate, 3, {256, 512, 1024}, options);
  for (std::size_t k = 0; k < reports.size(); ++k) {
    CHECK(reports[k].s1 == rerun[k].s1);
    CHECK(reports[k].st == rerun[k].st);
  }

  CHECK_THROWS_AS(convergence_curve(first_coordinate, 3, {512, 256}, options),
                  ConfigError);
}

TEST_CASE("report serialization shape") {
  SaltelliDesign design = saltelli_design(2, 64);
  Vector y = evaluate_rows(design, first_coordinate);
  SensitivityReport report = sobol_indices(design, y);
  std::string text = serialize_report(report, {"x1", "x2"}, '\t');
  // header plus one row per parameter
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(text.find("parameter\tS1") == 0);
}
