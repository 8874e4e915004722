#include "abo/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace abo {

namespace {
double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
}  // namespace

double mmd(const Eigen::Ref<const Matrix>& U) {
  const Index n = U.rows();
  if (n < 2) throw DegenerateDataError("mmd needs at least two rows");
  std::vector<double> nearest(static_cast<std::size_t>(n),
                              std::numeric_limits<double>::infinity());
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double d = (U.row(i) - U.row(j)).norm();
      nearest[static_cast<std::size_t>(i)] =
          std::min(nearest[static_cast<std::size_t>(i)], d);
      nearest[static_cast<std::size_t>(j)] =
          std::min(nearest[static_cast<std::size_t>(j)], d);
    }
  }
  return median_of(std::move(nearest));
}

double d_min(const Eigen::Ref<const Vector>& x,
             const Eigen::Ref<const Matrix>& X) {
  if (X.rows() < 1) throw DimensionError("d_min needs a non-empty design");
  if (x.size() != X.cols()) throw DimensionError("d_min dimension mismatch");
  double best = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < X.rows(); ++j)
    best = std::min(best, (x.transpose() - X.row(j)).norm());
  return best;
}

double exploitation_score(const Eigen::Ref<const Vector>& x,
                          const Eigen::Ref<const Matrix>& X) {
  const double dm = d_min(x, X);
  if (dm == 0.0) return std::numeric_limits<double>::infinity();
  return std::log(mmd(X) / dm);
}

std::vector<Candidate> filter_candidates(std::vector<Candidate> candidates,
                                         const Eigen::Ref<const Matrix>& X_prev,
                                         double threshold) {
  if (candidates.empty())
    throw DegenerateDataError("candidate set must be non-empty");
  for (Candidate& c : candidates) c.es = exploitation_score(c.x, X_prev);
  std::vector<Candidate> kept;
  for (const Candidate& c : candidates)
    if (c.es <= threshold) kept.push_back(c);
  if (kept.empty()) return candidates;  // skip rule
  return kept;
}

CatState CatState::uniform(int n_acquisitions) {
  CatState state;
  state.counts.assign(static_cast<std::size_t>(n_acquisitions), 1);
  return state;
}

int CatState::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0);
}

std::vector<double> CatState::probabilities() const {
  const double n = static_cast<double>(total());
  std::vector<double> p(counts.size());
  for (std::size_t a = 0; a < counts.size(); ++a)
    p[a] = static_cast<double>(counts[a]) / n;
  return p;
}

std::size_t sel_uniform(const std::vector<Candidate>& candidates,
                        RngStream& rng) {
  if (candidates.empty())
    throw DegenerateDataError("selection over an empty candidate set");
  if (candidates.size() == 1) return 0;
  return rng.index_below(candidates.size());
}

std::size_t sel_cat(const std::vector<Candidate>& candidates,
                    const CatState& state, RngStream& rng) {
  if (candidates.empty())
    throw DegenerateDataError("selection over an empty candidate set");
  if (candidates.size() == 1) return 0;
  std::vector<double> weights(candidates.size());
  double total = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const int a = candidates[i].acq_index;
    if (a < 0 || static_cast<std::size_t>(a) >= state.counts.size())
      throw DimensionError("candidate acquisition index outside the state");
    weights[i] = static_cast<double>(state.counts[static_cast<std::size_t>(a)]);
    total += weights[i];
  }
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return candidates.size() - 1;
}

CatState cat_update(CatState state, int selected, bool improved) {
  if (selected < 0 || static_cast<std::size_t>(selected) >= state.counts.size())
    throw DimensionError("selected acquisition index outside the state");
  if (improved) state.counts[static_cast<std::size_t>(selected)] += 1;
  state.last_selected = selected;
  return state;
}

EsSchedule EsSchedule::linear(double start, double end, int length) {
  EsSchedule s;
  s.start_ = start;
  s.end_ = end;
  s.length_ = std::max(length, 1);
  return s;
}

EsSchedule EsSchedule::constant(double value) {
  return linear(value, value, 1);
}

EsSchedule EsSchedule::explicit_values(std::vector<double> values) {
  if (values.empty())
    throw ConfigError("es_schedule: explicit values must be non-empty");
  EsSchedule s;
  s.values_ = std::move(values);
  s.length_ = static_cast<int>(s.values_.size());
  s.start_ = s.values_.front();
  s.end_ = s.values_.back();
  return s;
}

double EsSchedule::at(int i) const {
  if (i < 1) i = 1;
  if (!values_.empty()) {
    const std::size_t idx =
        std::min(static_cast<std::size_t>(i - 1), values_.size() - 1);
    return values_[idx];
  }
  if (length_ <= 1 || i >= length_) return end_;
  const double t = static_cast<double>(i - 1) / static_cast<double>(length_ - 1);
  return start_ + (end_ - start_) * t;
}

}  // namespace abo
