#pragma once

#include <array>
#include <string>
#include <vector>

#include "abo/bench.hpp"

namespace abo {

/// Pointwise maximum of the k-th quartile curves across a set of ensembles
/// (k in 0..4); all ensembles must share the iteration count. `shift` is
/// added to every incumbent value first.
Vector worst_case_aggregate(const std::vector<Matrix>& quartiles, int k,
                            double shift = 0.0);

/// Worst-case relative improvement of the challenger set over the reference
/// set in quartile k, as a percentage: 100 * (1 - median_i w_k(ref')/w_k(ref)).
/// Curves are shifted by `shift` (a declared objective lower-bound offset)
/// before the ratio; a non-positive reference curve raises
/// IllDefinedRatioError.
double wcri(const std::vector<Matrix>& reference,
            const std::vector<Matrix>& challenger, int k, double shift = 0.0);

struct WcriReport {
  std::array<double, 5> values{};  // percent per quartile
  std::string reference_id;
  std::string challenger_id;
  double shift = 0.0;
};

WcriReport wcri_report(const std::vector<RunEnsemble>& reference,
                       const std::vector<RunEnsemble>& challenger,
                       double shift, std::string reference_id,
                       std::string challenger_id);

/// One table row keyed the way the results table is laid out.
struct WcriRow {
  std::string objective;
  std::string model_init;  // "No GPi" / "GPi"
  std::string adaptivity;  // "No Ada" / "Ada" / "iAda"
  std::string sel;         // "", "SelCat", "SelU"
  WcriReport report;
};

/// Delimited table, rows ordered (objective, model init, adaptivity, sel),
/// columns Q0..Q4 as percentages with one decimal, plus the applied shift.
std::string emit_table(std::vector<WcriRow> rows, char delimiter);

/// Plot-ready series for one ensemble: iteration, q0..q4 and a marker column
/// flagging iterations at which the kernel search re-ran.
std::string emit_history_plotdata(const RunEnsemble& ensemble, char delimiter);

/// Median with the midpoint-of-central-pair convention for even lengths.
double median(std::vector<double> values);

/// Derives the (model init, adaptivity, sel) table key of a configuration.
void table_key(const OptimizerConfig& config, std::string& model_init,
               std::string& adaptivity, std::string& sel);

}  // namespace abo
