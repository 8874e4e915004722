#include "abo/kernels.hpp"

#include <cmath>
#include <sstream>

namespace abo {

int param_count(KernelFamily family) {
  return family == KernelFamily::RQ ? 4 : 3;
}

const char* family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::RBF:
      return "rbf";
    case KernelFamily::Matern32:
      return "matern32";
    case KernelFamily::RQ:
      return "rq";
  }
  return "?";
}

KernelFamily family_from_name(const std::string& name) {
  if (name == "rbf") return KernelFamily::RBF;
  if (name == "matern32") return KernelFamily::Matern32;
  if (name == "rq") return KernelFamily::RQ;
  throw ParameterDomainError("unknown kernel family: " + name);
}

ParamKind param_kind(KernelFamily family, int index) {
  if (index < 0 || index >= param_count(family))
    throw ParameterDomainError("parameter index out of range for family");
  if (family == KernelFamily::RQ) {
    constexpr ParamKind order[] = {ParamKind::C, ParamKind::Alpha,
                                   ParamKind::Lambda, ParamKind::S2};
    return order[index];
  }
  constexpr ParamKind order[] = {ParamKind::C, ParamKind::Lambda, ParamKind::S2};
  return order[index];
}

const char* param_name(KernelFamily family, int index) {
  switch (param_kind(family, index)) {
    case ParamKind::C:
      return "c";
    case ParamKind::Lambda:
      return "lambda";
    case ParamKind::S2:
      return "s2";
    case ParamKind::Alpha:
      return "alpha";
  }
  return "?";
}

double get_param(const KernelParams& p, KernelFamily family, int index) {
  switch (param_kind(family, index)) {
    case ParamKind::C:
      return p.c;
    case ParamKind::Lambda:
      return p.lambda;
    case ParamKind::S2:
      return p.s2;
    case ParamKind::Alpha:
      return p.alpha;
  }
  return 0.0;
}

void set_param(KernelParams& p, KernelFamily family, int index, double value) {
  switch (param_kind(family, index)) {
    case ParamKind::C:
      p.c = value;
      return;
    case ParamKind::Lambda:
      p.lambda = value;
      return;
    case ParamKind::S2:
      p.s2 = value;
      return;
    case ParamKind::Alpha:
      p.alpha = value;
      return;
  }
}

int KernelSpec::fixed_count() const {
  int n = 0;
  for (int t = 0; t < param_count(family); ++t)
    if (fixed[static_cast<std::size_t>(t)]) ++n;
  return n;
}

bool KernelSpec::same_domain(const KernelSpec& other) const {
  if (family != other.family) return false;
  for (int t = 0; t < param_count(family); ++t) {
    const auto& a = fixed[static_cast<std::size_t>(t)];
    const auto& b = other.fixed[static_cast<std::size_t>(t)];
    if (a.has_value() != b.has_value()) return false;
    if (a && *a != *b) return false;
  }
  return true;
}

std::string KernelSpec::domain_label() const {
  std::ostringstream os;
  os << family_name(family);
  bool first = true;
  for (int t = 0; t < param_count(family); ++t) {
    const auto& f = fixed[static_cast<std::size_t>(t)];
    if (!f) continue;
    os << (first ? "[" : ",") << param_name(family, t) << "=" << *f;
    first = false;
  }
  if (!first) os << "]";
  return os.str();
}

void KernelSpec::validate() const {
  const int T = param_count(family);
  for (std::size_t t = static_cast<std::size_t>(T); t < fixed.size(); ++t)
    if (fixed[t])
      throw ParameterDomainError("fixture index out of range for family");
  if (fixed_count() > 2)
    throw ParameterDomainError("at most two parameters may be fixed");
  KernelParams p = params;
  for (int t = 0; t < T; ++t)
    if (fixed[static_cast<std::size_t>(t)])
      set_param(p, family, t, *fixed[static_cast<std::size_t>(t)]);
  auto bad = [](double v) { return !std::isfinite(v); };
  if (bad(p.c) || bad(p.lambda) || bad(p.s2) || p.c <= 0.0 || p.lambda <= 0.0 ||
      p.s2 < 0.0)
    throw ParameterDomainError("kernel parameters out of domain");
  if (family == KernelFamily::RQ && (bad(p.alpha) || p.alpha <= 0.0))
    throw ParameterDomainError("rq alpha out of domain");
}

namespace detail {

double base_correlation(KernelFamily family, const KernelParams& p, double r2) {
  switch (family) {
    case KernelFamily::RBF:
      return std::exp(-r2 / (2.0 * p.lambda * p.lambda));
    case KernelFamily::Matern32: {
      double a = std::sqrt(3.0) * std::sqrt(r2) / p.lambda;
      return (1.0 + a) * std::exp(-a);
    }
    case KernelFamily::RQ:
      return std::pow(1.0 + r2 / (2.0 * p.alpha * p.lambda * p.lambda),
                      -p.alpha);
  }
  return 0.0;
}

double d_lambda(KernelFamily family, const KernelParams& p, double r2) {
  const double l = p.lambda;
  switch (family) {
    case KernelFamily::RBF:
      return p.c * base_correlation(family, p, r2) * r2 / (l * l * l);
    case KernelFamily::Matern32: {
      double a = std::sqrt(3.0) * std::sqrt(r2) / l;
      return p.c * 3.0 * r2 / (l * l * l) * std::exp(-a);
    }
    case KernelFamily::RQ: {
      double u = 1.0 + r2 / (2.0 * p.alpha * l * l);
      return p.c * std::pow(u, -p.alpha - 1.0) * r2 / (l * l * l);
    }
  }
  return 0.0;
}

double d_alpha(KernelFamily family, const KernelParams& p, double r2) {
  if (family != KernelFamily::RQ) return 0.0;
  const double l2 = p.lambda * p.lambda;
  double u = 1.0 + r2 / (2.0 * p.alpha * l2);
  double b = std::pow(u, -p.alpha);
  return p.c * b * (-std::log(u) + r2 / (2.0 * p.alpha * l2 * u));
}

}  // namespace detail

static void check_dims(Index du, Index dv) {
  if (du != dv) throw DimensionError("point dimensions differ");
  if (du < 1) throw DimensionError("points must have dimension >= 1");
}

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& u,
                   const Eigen::Ref<const Vector>& v) {
  check_dims(u.size(), v.size());
  spec.validate();
  const double r2 = (u - v).squaredNorm();
  double k = spec.params.c * detail::base_correlation(spec.family, spec.params, r2);
  if (u == v) k += spec.params.s2;
  return k;
}

Matrix kernel_matrix(const KernelSpec& spec, const Eigen::Ref<const Matrix>& X) {
  if (X.rows() < 1 || X.cols() < 1)
    throw DimensionError("design matrix must be at least 1 x 1");
  spec.validate();
  const Index n = X.rows();
  Matrix K(n, n);
  for (Index i = 0; i < n; ++i) {
    K(i, i) = spec.params.c + spec.params.s2;
    for (Index j = i + 1; j < n; ++j) {
      double r2 = (X.row(i) - X.row(j)).squaredNorm();
      double k = spec.params.c *
                 detail::base_correlation(spec.family, spec.params, r2);
      K(i, j) = k;
      K(j, i) = k;
    }
  }
  return K;
}

Vector kernel_vector(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                     const Eigen::Ref<const Matrix>& X) {
  check_dims(x.size(), X.cols());
  spec.validate();
  const Index n = X.rows();
  Vector k(n);
  for (Index j = 0; j < n; ++j) {
    double r2 = (x.transpose() - X.row(j)).squaredNorm();
    k(j) = spec.params.c * detail::base_correlation(spec.family, spec.params, r2);
    if (x.transpose() == X.row(j)) k(j) += spec.params.s2;
  }
  return k;
}

}  // namespace abo
