#include "abo/report.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

namespace abo {

double median(std::vector<double> values) {
  if (values.empty()) throw DegenerateDataError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Vector worst_case_aggregate(const std::vector<Matrix>& quartiles, int k,
                            double shift) {
  if (quartiles.empty())
    throw DegenerateDataError("worst-case aggregate over no ensembles");
  if (k < 0 || k > 4) throw DimensionError("quartile index must be in 0..4");
  const Index iterations = quartiles.front().cols();
  Vector w(iterations);
  for (const Matrix& q : quartiles)
    if (q.cols() != iterations)
      throw DimensionError("ensembles disagree on iteration count");
  for (Index i = 0; i < iterations; ++i) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const Matrix& q : quartiles) worst = std::max(worst, q(k, i) + shift);
    w(i) = worst;
  }
  return w;
}

double wcri(const std::vector<Matrix>& reference,
            const std::vector<Matrix>& challenger, int k, double shift) {
  Vector w_ref = worst_case_aggregate(reference, k, shift);
  Vector w_chal = worst_case_aggregate(challenger, k, shift);
  if (w_ref.size() != w_chal.size())
    throw DimensionError("reference and challenger iteration counts differ");
  std::vector<double> ratios(static_cast<std::size_t>(w_ref.size()));
  for (Index i = 0; i < w_ref.size(); ++i) {
    if (!(w_ref(i) > 0.0))
      throw IllDefinedRatioError(
          "reference aggregate is non-positive; supply a lower-bound shift");
    ratios[static_cast<std::size_t>(i)] = w_chal(i) / w_ref(i);
  }
  return 100.0 * (1.0 - median(std::move(ratios)));
}

WcriReport wcri_report(const std::vector<RunEnsemble>& reference,
                       const std::vector<RunEnsemble>& challenger,
                       double shift, std::string reference_id,
                       std::string challenger_id) {
  std::vector<Matrix> ref_q, chal_q;
  for (const RunEnsemble& e : reference) ref_q.push_back(quartile_curves(e));
  for (const RunEnsemble& e : challenger) chal_q.push_back(quartile_curves(e));
  WcriReport report;
  report.reference_id = std::move(reference_id);
  report.challenger_id = std::move(challenger_id);
  report.shift = shift;
  for (int k = 0; k < 5; ++k)
    report.values[static_cast<std::size_t>(k)] = wcri(ref_q, chal_q, k, shift);
  return report;
}

void table_key(const OptimizerConfig& config, std::string& model_init,
               std::string& adaptivity, std::string& sel) {
  model_init = variant_uses_gpi(config.variant) ? "GPi" : "No GPi";
  if (!variant_uses_portfolio(config.variant)) {
    adaptivity = "No Ada";
    sel = "";
  } else {
    adaptivity = variant_uses_es_filter(config.variant) ? "iAda" : "Ada";
    sel = config.selection == SelectionStrategy::Categorical ? "SelCat"
                                                             : "SelU";
  }
}

namespace {

int rank_model_init(const std::string& s) { return s == "No GPi" ? 0 : 1; }
int rank_adaptivity(const std::string& s) {
  if (s == "No Ada") return 0;
  if (s == "Ada") return 1;
  return 2;
}
int rank_sel(const std::string& s) {
  if (s.empty()) return 0;
  return s == "SelCat" ? 1 : 2;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::string shift_str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string emit_table(std::vector<WcriRow> rows, char delimiter) {
  if (rows.empty()) throw DegenerateDataError("table with no rows");
  std::stable_sort(rows.begin(), rows.end(),
                   [](const WcriRow& a, const WcriRow& b) {
                     if (a.objective != b.objective)
                       return a.objective < b.objective;
                     if (a.model_init != b.model_init)
                       return rank_model_init(a.model_init) <
                              rank_model_init(b.model_init);
                     if (a.adaptivity != b.adaptivity)
                       return rank_adaptivity(a.adaptivity) <
                              rank_adaptivity(b.adaptivity);
                     return rank_sel(a.sel) < rank_sel(b.sel);
                   });
  std::ostringstream os;
  const char d = delimiter;
  os << "objective" << d << "model_init" << d << "adaptivity" << d << "sel"
     << d << "Q0" << d << "Q1" << d << "Q2" << d << "Q3" << d << "Q4" << d
     << "offset\n";
  for (const WcriRow& row : rows) {
    os << row.objective << d << row.model_init << d << row.adaptivity << d
       << row.sel;
    for (double v : row.report.values) os << d << pct(v);
    os << d << shift_str(row.report.shift) << "\n";
  }
  return os.str();
}

std::string emit_history_plotdata(const RunEnsemble& ensemble, char delimiter) {
  Matrix q = quartile_curves(ensemble);
  const bool gpi_variant = variant_uses_gpi(ensemble.config.variant);
  std::vector<int> markers(static_cast<std::size_t>(q.cols()), 0);
  if (gpi_variant) {
    for (const RunHistory& h : ensemble.histories)
      for (std::size_t i = 0; i < h.records.size(); ++i)
        if (h.records[i].gpi_event && i < markers.size()) markers[i] = 1;
  }
  std::ostringstream os;
  const char d = delimiter;
  os << "iteration" << d << "q0" << d << "q1" << d << "q2" << d << "q3" << d
     << "q4" << d << "gpi_event\n";
  char buf[32];
  for (Index i = 0; i < q.cols(); ++i) {
    os << (i + 1);
    for (int k = 0; k < 5; ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", q(k, i));
      os << d << buf;
    }
    os << d << markers[static_cast<std::size_t>(i)] << "\n";
  }
  return os.str();
}

}  // namespace abo
