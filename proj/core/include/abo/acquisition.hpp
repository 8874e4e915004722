#pragma once

#include <string>

#include "abo/gpr.hpp"

namespace abo {

enum class AcquisitionKind { EI, LogEI, PI, LogPI, UCB };

const char* acquisition_name(AcquisitionKind kind);
AcquisitionKind acquisition_from_name(const std::string& name);

/// An acquisition function under the minimization convention: larger values
/// mark more promising designs. UCB is evaluated as -mu + beta * sigma so
/// that maximizing it pursues low predicted means.
struct Acquisition {
  AcquisitionKind kind = AcquisitionKind::LogEI;
  double beta = 2.0;  // UCB confidence weight, > 0

  std::string label() const;
  void validate() const;
};

/// Belief value at x given the fitted surrogate and the incumbent minimum.
/// With z = (incumbent - mean) / sigma: EI = sigma (z Phi(z) + phi(z)),
/// PI = Phi(z), UCB = -mean + beta sigma. Log variants evaluate the log of
/// the positive quantity through asymptotics instead of log(value).
double acq_eval(const Acquisition& acq, const Rpd& rpd,
                const Eigen::Ref<const Vector>& x, double incumbent);

/// The same belief value from a given predictive mean and standard deviation;
/// sigma == 0 takes the limit values (EI = max(incumbent - mean, 0),
/// PI in {0, 1}).
double acq_value(const Acquisition& acq, double mean, double sigma,
                 double incumbent);

struct AcqBudget {
  int seed_count = 512;    // quasi-random evaluation seeds
  int refine_top = 4;      // best seeds receiving local ascent
  int refine_steps = 100;  // ascent iterations per refined seed
  double initial_step = 1e-3;
};

/// Approximate argmax of the acquisition over the unit cube: evaluate at
/// Sobol' seed points (offset drawn from the stream), then refine the best
/// few by projected normalized-gradient ascent with step halving.
/// Deterministic given the stream; always returns a point.
Vector acq_maximize(const Acquisition& acq, const Rpd& rpd, double incumbent,
                    const AcqBudget& budget, RngStream& rng);

namespace detail {
double norm_pdf(double z);
double norm_cdf(double z);
double log_norm_pdf(double z);
/// ln Phi(z), stable for large negative z via the Mills-ratio continued
/// fraction.
double log_norm_cdf(double z);
/// ln(z Phi(z) + phi(z)), the z-dependent factor of log expected improvement.
double log_ei_term(double z);
}  // namespace detail

}  // namespace abo
