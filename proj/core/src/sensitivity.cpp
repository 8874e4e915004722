#include "abo/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "abo/bench.hpp"  // quantile_linear
#include "abo/errors.hpp"

namespace abo {

namespace {

struct Blocks {
  Vector a, b;           // length n
  std::vector<Vector> ab;  // dim entries of length n
};

Blocks slice_outputs(const SaltelliDesign& design, const Vector& y) {
  const Index n = design.n_base;
  if (y.size() != n * (design.dim + 2))
    throw DimensionError("output vector length must be n_base * (dim + 2)");
  Blocks blocks;
  blocks.a = y.segment(0, n);
  blocks.b = y.segment(n, n);
  for (int i = 0; i < design.dim; ++i)
    blocks.ab.push_back(y.segment(static_cast<Index>(2 + i) * n, n));
  return blocks;
}

// Index estimates over an arbitrary multiset of base-sample positions.
void estimate(const Blocks& blocks, const std::vector<Index>& rows, Vector& s1,
              Vector& st) {
  const Index n = static_cast<Index>(rows.size());
  const int dim = static_cast<int>(blocks.ab.size());
  double mean = 0.0;
  for (Index j : rows) mean += blocks.a(j) + blocks.b(j);
  mean /= static_cast<double>(2 * n);
  double var = 0.0;
  for (Index j : rows) {
    const double da = blocks.a(j) - mean;
    const double db = blocks.b(j) - mean;
    var += da * da + db * db;
  }
  var /= static_cast<double>(2 * n);
  if (var <= 0.0)
    throw DegenerateDataError("zero output variance; indices undefined");

  s1.resize(dim);
  st.resize(dim);
  for (int i = 0; i < dim; ++i) {
    const Vector& ab = blocks.ab[static_cast<std::size_t>(i)];
    double first = 0.0, total = 0.0;
    for (Index j : rows) {
      first += (blocks.b(j) - mean) * (ab(j) - blocks.a(j));
      const double diff = blocks.a(j) - ab(j);
      total += diff * diff;
    }
    s1(i) = first / static_cast<double>(n) / var;
    st(i) = total / (2.0 * static_cast<double>(n)) / var;
  }
}

std::vector<Index> identity_rows(Index n) {
  std::vector<Index> rows(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) rows[static_cast<std::size_t>(j)] = j;
  return rows;
}

}  // namespace

SensitivityReport sobol_indices(const SaltelliDesign& design, const Vector& y) {
  Blocks blocks = slice_outputs(design, y);
  SensitivityReport report;
  report.n_base = design.n_base;
  estimate(blocks, identity_rows(design.n_base), report.s1, report.st);
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  report.s1_low = Vector::Constant(design.dim, nan);
  report.s1_high = Vector::Constant(design.dim, nan);
  report.st_low = Vector::Constant(design.dim, nan);
  report.st_high = Vector::Constant(design.dim, nan);
  return report;
}

void bootstrap_ci(SensitivityReport& report, const SaltelliDesign& design,
                  const Vector& y, double level, int resamples,
                  RngStream& rng) {
  if (resamples < 100)
    throw ConfigError("bootstrap_resamples: at least 100 required");
  if (!(level > 0.0 && level < 1.0))
    throw ConfigError("ci_level: must lie in (0, 1)");
  Blocks blocks = slice_outputs(design, y);
  const Index n = design.n_base;
  const int dim = design.dim;

  std::vector<std::vector<double>> s1_stats(
      static_cast<std::size_t>(dim)),
      st_stats(static_cast<std::size_t>(dim));
  std::vector<Index> rows(static_cast<std::size_t>(n));
  Vector s1, st;
  for (int r = 0; r < resamples; ++r) {
    for (Index j = 0; j < n; ++j)
      rows[static_cast<std::size_t>(j)] =
          static_cast<Index>(rng.index_below(static_cast<std::size_t>(n)));
    try {
      estimate(blocks, rows, s1, st);
    } catch (const DegenerateDataError&) {
      continue;  // resample collapsed onto a constant; skip it
    }
    for (int i = 0; i < dim; ++i) {
      s1_stats[static_cast<std::size_t>(i)].push_back(s1(i));
      st_stats[static_cast<std::size_t>(i)].push_back(st(i));
    }
  }

  const double lo_p = (1.0 - level) / 2.0;
  const double hi_p = 1.0 - lo_p;
  report.ci_level = level;
  report.s1_low.resize(dim);
  report.s1_high.resize(dim);
  report.st_low.resize(dim);
  report.st_high.resize(dim);
  for (int i = 0; i < dim; ++i) {
    auto& s1s = s1_stats[static_cast<std::size_t>(i)];
    auto& sts = st_stats[static_cast<std::size_t>(i)];
    if (s1s.empty())
      throw DegenerateDataError("all bootstrap resamples degenerate");
    report.s1_low(i) = quantile_linear(s1s, lo_p);
    report.s1_high(i) = quantile_linear(s1s, hi_p);
    report.st_low(i) = quantile_linear(sts, lo_p);
    report.st_high(i) = quantile_linear(sts, hi_p);
  }
}

std::vector<SensitivityReport> convergence_curve(
    const ObjectiveFn& objective, int dim, const std::vector<Index>& n_bases,
    const ConvergenceOptions& options) {
  if (n_bases.empty())
    throw ConfigError("ng: at least one base sample count required");
  for (std::size_t i = 1; i < n_bases.size(); ++i)
    if (n_bases[i] <= n_bases[i - 1])
      throw ConfigError("ng: base sample counts must increase");
  std::vector<SensitivityReport> reports;
  for (std::size_t k = 0; k < n_bases.size(); ++k) {
    SaltelliDesign design = saltelli_design(dim, n_bases[k]);
    Vector y(design.rows.rows());
    for (Index r = 0; r < design.rows.rows(); ++r)
      y(r) = objective(design.rows.row(r));
    SensitivityReport report = sobol_indices(design, y);
    if (options.bootstrap_resamples > 0) {
      RngStream rng(options.seed, "bootstrap", k);
      bootstrap_ci(report, design, y, options.ci_level,
                   options.bootstrap_resamples, rng);
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

std::string serialize_report(const SensitivityReport& report,
                             const std::vector<std::string>& names,
                             char delimiter) {
  if (static_cast<Index>(names.size()) != report.s1.size())
    throw DimensionError("one name per parameter required");
  std::ostringstream os;
  const char d = delimiter;
  os << "parameter" << d << "S1" << d << "S1_low" << d << "S1_high" << d
     << "ST" << d << "ST_low" << d << "ST_high\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << d << buf;
  };
  for (std::size_t i = 0; i < names.size(); ++i) {
    os << names[i];
    const Index j = static_cast<Index>(i);
    put(report.s1(j));
    put(report.s1_low(j));
    put(report.s1_high(j));
    put(report.st(j));
    put(report.st_low(j));
    put(report.st_high(j));
    os << "\n";
  }
  return os.str();
}

}  // namespace abo
