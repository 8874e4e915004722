#include "abo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "abo/sampling.hpp"

namespace abo {

namespace detail {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kHalfLog2Pi = 0.91893853320467274178;

// Mills ratio Phi(-w)/phi(w) for w > 0 via the continued fraction
// 1/(w + 1/(w + 2/(w + 3/(...)))), evaluated bottom-up.
double mills_ratio(double w) {
  double r = 0.0;
  for (int k = 64; k >= 1; --k) r = static_cast<double>(k) / (w + r);
  return 1.0 / (w + r);
}
}  // namespace

double norm_pdf(double z) {
  return std::exp(-0.5 * z * z - kHalfLog2Pi);
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double log_norm_pdf(double z) { return -0.5 * z * z - kHalfLog2Pi; }

double log_norm_cdf(double z) {
  if (z >= -6.0) return std::log(norm_cdf(z));
  return log_norm_pdf(z) + std::log(mills_ratio(-z));
}

double log_ei_term(double z) {
  if (z >= -6.0) {
    double value = z * norm_cdf(z) + norm_pdf(z);
    return std::log(value);
  }
  // z Phi(z) + phi(z) = phi(z) (1 - w R(w)) with w = -z and Mills ratio R
  const double w = -z;
  return log_norm_pdf(z) + std::log1p(-w * mills_ratio(w));
}

}  // namespace detail

const char* acquisition_name(AcquisitionKind kind) {
  switch (kind) {
    case AcquisitionKind::EI:
      return "ei";
    case AcquisitionKind::LogEI:
      return "logei";
    case AcquisitionKind::PI:
      return "pi";
    case AcquisitionKind::LogPI:
      return "logpi";
    case AcquisitionKind::UCB:
      return "ucb";
  }
  return "?";
}

AcquisitionKind acquisition_from_name(const std::string& name) {
  if (name == "ei") return AcquisitionKind::EI;
  if (name == "logei") return AcquisitionKind::LogEI;
  if (name == "pi") return AcquisitionKind::PI;
  if (name == "logpi") return AcquisitionKind::LogPI;
  if (name == "ucb") return AcquisitionKind::UCB;
  throw ConfigError("unknown acquisition kind: " + name);
}

std::string Acquisition::label() const {
  if (kind == AcquisitionKind::UCB)
    return std::string("ucb(") + std::to_string(beta) + ")";
  return acquisition_name(kind);
}

void Acquisition::validate() const {
  // beta = 0 degenerates UCB to pure mean minimization; negatives rejected
  if (kind == AcquisitionKind::UCB && !(beta >= 0.0))
    throw ConfigError("beta: must be >= 0 for ucb");
}

double acq_value(const Acquisition& acq, double mean, double sigma,
                 double incumbent) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  if (sigma == 0.0) {
    const double gap = incumbent - mean;
    switch (acq.kind) {
      case AcquisitionKind::EI:
        return std::max(gap, 0.0);
      case AcquisitionKind::LogEI:
        return gap > 0.0 ? std::log(gap) : neg_inf;
      case AcquisitionKind::PI:
        return gap > 0.0 ? 1.0 : 0.0;
      case AcquisitionKind::LogPI:
        return gap > 0.0 ? 0.0 : neg_inf;
      case AcquisitionKind::UCB:
        return -mean;
    }
  }

  const double z = (incumbent - mean) / sigma;
  switch (acq.kind) {
    case AcquisitionKind::EI:
      return sigma * (z * detail::norm_cdf(z) + detail::norm_pdf(z));
    case AcquisitionKind::LogEI:
      return std::log(sigma) + detail::log_ei_term(z);
    case AcquisitionKind::PI:
      return detail::norm_cdf(z);
    case AcquisitionKind::LogPI:
      return detail::log_norm_cdf(z);
    case AcquisitionKind::UCB:
      return -mean + acq.beta * sigma;
  }
  return neg_inf;
}

double acq_eval(const Acquisition& acq, const Rpd& rpd,
                const Eigen::Ref<const Vector>& x, double incumbent) {
  acq.validate();
  auto [mu, var] = rpd.predict(x);
  return acq_value(acq, mu, std::sqrt(std::max(0.0, var)), incumbent);
}

Vector acq_maximize(const Acquisition& acq, const Rpd& rpd, double incumbent,
                    const AcqBudget& budget, RngStream& rng) {
  acq.validate();
  const int dim = static_cast<int>(rpd.dim());
  const std::uint64_t skip = rng.next_u64() & ((1ULL << 20) - 1);
  Matrix seeds = sobol_points(dim, budget.seed_count, skip);

  auto value_at = [&](const Vector& x) { return acq_eval(acq, rpd, x, incumbent); };

  std::vector<double> seed_values(static_cast<std::size_t>(budget.seed_count));
  for (int i = 0; i < budget.seed_count; ++i)
    seed_values[static_cast<std::size_t>(i)] = value_at(seeds.row(i));

  std::vector<int> order(static_cast<std::size_t>(budget.seed_count));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return seed_values[static_cast<std::size_t>(a)] >
           seed_values[static_cast<std::size_t>(b)];
  });

  auto clamp_unit = [](Vector v) {
    for (Index i = 0; i < v.size(); ++i) v(i) = std::clamp(v(i), 0.0, 1.0);
    return v;
  };

  Vector best_x = seeds.row(order[0]);
  double best_value = seed_values[static_cast<std::size_t>(order[0])];

  const int n_refine = std::min(budget.refine_top, budget.seed_count);
  for (int r = 0; r < n_refine; ++r) {
    Vector x = seeds.row(order[static_cast<std::size_t>(r)]);
    double fx = seed_values[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])];
    double step = budget.initial_step;
    constexpr double grad_h = 1e-6;
    for (int it = 0; it < budget.refine_steps && step > 1e-12; ++it) {
      Vector grad(dim);
      for (int d = 0; d < dim; ++d) {
        Vector xp = x, xm = x;
        xp(d) = std::min(1.0, x(d) + grad_h);
        xm(d) = std::max(0.0, x(d) - grad_h);
        const double denom = xp(d) - xm(d);
        grad(d) = denom > 0.0 ? (value_at(xp) - value_at(xm)) / denom : 0.0;
      }
      const double norm = grad.norm();
      if (!(norm > 0.0) || !std::isfinite(norm)) break;
      Vector cand = clamp_unit(x + (step / norm) * grad);
      const double fc = value_at(cand);
      if (fc > fx) {
        x = std::move(cand);
        fx = fc;
      } else {
        step *= 0.5;
      }
    }
    if (fx > best_value) {
      best_value = fx;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace abo
