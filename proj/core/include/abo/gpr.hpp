#pragma once

#include <utility>

#include "abo/kernels.hpp"
#include "abo/rng.hpp"

namespace abo {

/// Design of experiments: N x D design matrix with rows in the unit cube,
/// paired with the N observed objective values.
struct Doe {
  Matrix X;
  Vector y;

  Index n() const { return X.rows(); }
  Index dim() const { return X.cols(); }

  void validate() const;

  /// Rows of `other` appended below this design.
  static Doe concat(const Doe& a, const Doe& b);
  void append(const Eigen::Ref<const Vector>& x, double y_value);
};

/// Box bounds for free kernel parameters, in standardized-output /
/// unit-cube-input units. Likelihood optimization runs in log space.
struct ParamBounds {
  double lo = 0.0;
  double hi = 0.0;
  static ParamBounds of(ParamKind kind);
};

struct FitOptions {
  int restarts = 8;
  int max_iterations = 200;
  double rel_tolerance = 1e-9;
};

/// Negative log likelihood ln det K + y' K^-1 y of the given design under
/// the given kernel, via Cholesky with escalating jitter. Operates on the
/// data exactly as passed (no standardization).
double nll(const Doe& doe, const KernelSpec& spec);

/// Fitted regressive-predictive distribution: standardized training data,
/// the kernel at its fitted parameters, and cached factorization products.
class Rpd {
 public:
  /// De-standardized predictive mean and variance at x; variance >= 0.
  std::pair<double, double> predict(const Eigen::Ref<const Vector>& x) const;

  const KernelSpec& spec() const { return spec_; }
  const Doe& standardized_doe() const { return doe_; }
  Index dim() const { return doe_.dim(); }
  double y_mean() const { return y_mean_; }
  double y_std() const { return y_std_; }
  /// Final optimizer objective (negative log likelihood in standardized space).
  double final_nll() const { return final_nll_; }
  const Matrix& chol() const { return chol_; }
  const Vector& alpha_vec() const { return alpha_; }
  double jitter() const { return jitter_; }

 private:
  friend Rpd fit_mle(const Doe&, const KernelSpec&, const FitOptions&,
                     RngStream&);
  Doe doe_;  // standardized outputs
  KernelSpec spec_;
  Matrix chol_;   // lower-triangular factor of K + jitter I
  Vector alpha_;  // (K + jitter I)^-1 y
  double y_mean_ = 0.0;
  double y_std_ = 1.0;
  double final_nll_ = 0.0;
  double jitter_ = 0.0;
};

/// Maximum-likelihood fit over the spec's free parameters (those not frozen
/// by the fixture mask), restarted from log-uniform draws within bounds.
/// Outputs are standardized to zero mean / unit variance before fitting;
/// predictions de-standardize. Deterministic given the stream.
Rpd fit_mle(const Doe& doe, const KernelSpec& spec, const FitOptions& options,
            RngStream& rng);

inline Rpd fit_mle(const Doe& doe, const KernelSpec& spec, int restarts,
                   RngStream& rng) {
  FitOptions options;
  options.restarts = restarts;
  return fit_mle(doe, spec, options, rng);
}

namespace detail {
/// Lower Cholesky factor of K + jitter I with escalating jitter:
/// first attempt without jitter, then 1e-10 * mean(diag K) scaled by 10 up
/// to six times. Throws IllConditionedError when all attempts fail.
std::pair<Matrix, double> cholesky_with_jitter(const Matrix& K);
}  // namespace detail

}  // namespace abo
