#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>

#include "abo/errors.hpp"

namespace abo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class KernelFamily { RBF, Matern32, RQ };

/// Number of model parameters T for a family: 3 for RBF and Matern32
/// (c, lambda, s2), 4 for RQ (c, alpha, lambda, s2).
int param_count(KernelFamily family);

const char* family_name(KernelFamily family);
KernelFamily family_from_name(const std::string& name);

/// Covariance kernel parameters. `alpha` is meaningful for RQ only.
///   c      output scale (objective units squared), > 0
///   lambda isotropic length-scale (unit-cube distance), > 0
///   s2     noise variance (objective units squared), >= 0
///   alpha  RQ shape, dimensionless, > 0
struct KernelParams {
  double c = 1.0;
  double lambda = 1.0;
  double s2 = 0.0;
  double alpha = 1.0;
};

/// Position of a family's parameter with index t in its parameter vector.
/// RBF / Matern32: (c, lambda, s2); RQ: (c, alpha, lambda, s2).
enum class ParamKind { C = 0, Lambda = 1, S2 = 2, Alpha = 3 };

ParamKind param_kind(KernelFamily family, int index);
const char* param_name(KernelFamily family, int index);
double get_param(const KernelParams& p, KernelFamily family, int index);
void set_param(KernelParams& p, KernelFamily family, int index, double value);

/// A kernel family with parameters and a restricted likelihood domain:
/// `fixed[t]`, when set, freezes parameter t of the family's vector at the
/// stored value during likelihood optimization. At most two indices may be
/// fixed.
struct KernelSpec {
  KernelFamily family = KernelFamily::RBF;
  KernelParams params;
  std::array<std::optional<double>, 4> fixed{};

  int fixed_count() const;
  bool same_domain(const KernelSpec& other) const;  // family + fixture identity
  std::string domain_label() const;  // e.g. "matern32", "rq[lambda=0.316]"

  /// Throws ParameterDomainError on invalid parameters or fixtures.
  void validate() const;
};

/// Pointwise covariance. The noise term contributes s2 exactly when u and v
/// are bitwise-identical points.
double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& u,
                   const Eigen::Ref<const Vector>& v);

/// N x N covariance matrix of the rows of X. The noise term is applied by
/// row index (s2 on the diagonal only), so duplicated rows do not couple
/// through the noise.
Matrix kernel_matrix(const KernelSpec& spec, const Eigen::Ref<const Matrix>& X);

/// Cross-covariance vector kappa(x, X); element j follows the kernel_eval
/// convention (value identity), so a query equal to a training row picks up
/// the s2 term.
Vector kernel_vector(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                     const Eigen::Ref<const Matrix>& X);

namespace detail {
/// Correlation part without output scale and noise, as a function of
/// squared distance. Used by covariance assembly and likelihood gradients.
double base_correlation(KernelFamily family, const KernelParams& p, double r2);
/// Partial derivatives of c * base_correlation w.r.t. lambda and alpha.
double d_lambda(KernelFamily family, const KernelParams& p, double r2);
double d_alpha(KernelFamily family, const KernelParams& p, double r2);
}  // namespace detail

}  // namespace abo
