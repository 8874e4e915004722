#include "abo/gpr.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace abo {

void Doe::validate() const {
  if (X.rows() < 1) throw DimensionError("design needs at least one row");
  if (X.rows() != y.size())
    throw DimensionError("design rows and objective values differ in count");
  if (!X.allFinite() || !y.allFinite())
    throw ParameterDomainError("design contains non-finite entries");
}

Doe Doe::concat(const Doe& a, const Doe& b) {
  if (b.n() == 0) return a;
  if (a.n() == 0) return b;
  if (a.dim() != b.dim()) throw DimensionError("designs differ in dimension");
  Doe out;
  out.X.resize(a.n() + b.n(), a.dim());
  out.X << a.X, b.X;
  out.y.resize(a.n() + b.n());
  out.y << a.y, b.y;
  return out;
}

void Doe::append(const Eigen::Ref<const Vector>& x, double y_value) {
  if (n() > 0 && x.size() != dim())
    throw DimensionError("appended point dimension mismatch");
  X.conservativeResize(X.rows() + 1, x.size());
  X.row(X.rows() - 1) = x;
  y.conservativeResize(y.size() + 1);
  y(y.size() - 1) = y_value;
}

ParamBounds ParamBounds::of(ParamKind kind) {
  switch (kind) {
    case ParamKind::C:
      return {1e-3, 1e3};
    case ParamKind::Lambda:
      return {1e-3, 1e2};
    case ParamKind::S2:
      return {1e-8, 1.0};
    case ParamKind::Alpha:
      return {1e-2, 1e2};
  }
  return {};
}

namespace detail {

std::pair<Matrix, double> cholesky_with_jitter(const Matrix& K) {
  const Index n = K.rows();
  const double mean_diag = K.diagonal().sum() / static_cast<double>(n);
  double jitter = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Matrix Kj = K;
    if (jitter > 0.0) Kj.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(Kj);
    if (llt.info() == Eigen::Success) return {Matrix(llt.matrixL()), jitter};
    jitter = (jitter == 0.0) ? 1e-10 * mean_diag : jitter * 10.0;
  }
  throw IllConditionedError(
      "Cholesky factorization failed after maximum jitter escalation");
}

}  // namespace detail

namespace {

double nll_from_chol(const Matrix& L, const Vector& y) {
  Vector z = L.triangularView<Eigen::Lower>().solve(y);
  return 2.0 * L.diagonal().array().log().sum() + z.squaredNorm();
}

struct NllGradient {
  double value;
  Vector grad_log;  // w.r.t. log of the free parameters
};

// NLL and gradient at the given (full) parameters, in log space of the free
// indices. d NLL / d theta = tr(K^-1 dK) - a' dK a with a = K^-1 y.
NllGradient nll_with_gradient(const Matrix& X, const Vector& y,
                              KernelFamily family, const KernelParams& params,
                              const std::vector<int>& free_indices) {
  const Index n = X.rows();
  KernelSpec spec{family, params, {}};
  Matrix K = kernel_matrix(spec, X);
  auto [L, jitter] = detail::cholesky_with_jitter(K);
  (void)jitter;
  NllGradient out;
  out.value = nll_from_chol(L, y);

  // K^-1 and alpha via the factor
  Matrix Kinv = Matrix::Identity(n, n);
  L.triangularView<Eigen::Lower>().solveInPlace(Kinv);
  L.transpose().triangularView<Eigen::Upper>().solveInPlace(Kinv);
  Vector alpha = Kinv * y;

  Matrix r2(n, n);
  for (Index i = 0; i < n; ++i) {
    r2(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      double d = (X.row(i) - X.row(j)).squaredNorm();
      r2(i, j) = d;
      r2(j, i) = d;
    }
  }

  out.grad_log.resize(static_cast<Index>(free_indices.size()));
  Matrix dK(n, n);
  for (std::size_t fi = 0; fi < free_indices.size(); ++fi) {
    const int t = free_indices[fi];
    const ParamKind kind = param_kind(family, t);
    switch (kind) {
      case ParamKind::C:
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < n; ++j)
            dK(i, j) = detail::base_correlation(family, params, r2(i, j));
        break;
      case ParamKind::Lambda:
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < n; ++j)
            dK(i, j) = detail::d_lambda(family, params, r2(i, j));
        break;
      case ParamKind::S2:
        dK = Matrix::Identity(n, n);
        break;
      case ParamKind::Alpha:
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < n; ++j)
            dK(i, j) = detail::d_alpha(family, params, r2(i, j));
        break;
    }
    double trace_term = (Kinv.array() * dK.array()).sum();
    double quad_term = alpha.dot(dK * alpha);
    double d_theta = trace_term - quad_term;
    out.grad_log(static_cast<Index>(fi)) =
        d_theta * get_param(params, family, t);
  }
  return out;
}

struct BfgsProblem {
  const Matrix& X;
  const Vector& y;
  KernelFamily family;
  KernelParams base;  // fixed parameters already applied
  const std::vector<int>& free_indices;

  KernelParams assemble(const Vector& log_free) const {
    KernelParams p = base;
    for (std::size_t i = 0; i < free_indices.size(); ++i)
      set_param(p, family, free_indices[i],
                std::exp(log_free(static_cast<Index>(i))));
    return p;
  }

  double value(const Vector& log_free) const {
    KernelSpec spec{family, assemble(log_free), {}};
    Matrix K = kernel_matrix(spec, X);
    auto [L, jitter] = detail::cholesky_with_jitter(K);
    (void)jitter;
    return nll_from_chol(L, y);
  }

  NllGradient value_and_grad(const Vector& log_free) const {
    return nll_with_gradient(X, y, family, assemble(log_free), free_indices);
  }
};

// Projected BFGS with Armijo backtracking; monotone by construction.
// Convergence on relative objective change below rel_tol or max_iter.
struct BfgsOutcome {
  Vector x;
  double f;
};

BfgsOutcome minimize_projected_bfgs(const BfgsProblem& problem, Vector x,
                                    const Vector& lb, const Vector& ub,
                                    int max_iter, double rel_tol) {
  const Index m = x.size();
  auto project = [&](Vector v) {
    for (Index i = 0; i < m; ++i) v(i) = std::clamp(v(i), lb(i), ub(i));
    return v;
  };
  x = project(std::move(x));
  if (m == 0) return {x, problem.value(x)};

  NllGradient cur = problem.value_and_grad(x);
  Matrix H = Matrix::Identity(m, m);  // inverse Hessian approximation
  for (int iter = 0; iter < max_iter; ++iter) {
    Vector direction = -(H * cur.grad_log);
    if (direction.dot(cur.grad_log) >= 0.0) direction = -cur.grad_log;

    double step = 1.0;
    const double slope = direction.dot(cur.grad_log);
    Vector x_next;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      x_next = project(x + step * direction);
      double f_try;
      try {
        f_try = problem.value(x_next);
      } catch (const IllConditionedError&) {
        step *= 0.5;
        continue;
      }
      if (std::isfinite(f_try) && f_try <= cur.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    NllGradient next = problem.value_and_grad(x_next);
    Vector s = x_next - x;
    Vector yv = next.grad_log - cur.grad_log;
    double sy = s.dot(yv);
    if (sy > 1e-12) {
      Matrix sy_outer = s * yv.transpose();
      double rho = 1.0 / sy;
      Matrix I = Matrix::Identity(m, m);
      H = (I - rho * sy_outer) * H * (I - rho * sy_outer.transpose()) +
          rho * (s * s.transpose());
    }
    const double change =
        std::abs(cur.value - next.value) / std::max(1.0, std::abs(cur.value));
    x = x_next;
    cur = next;
    if (change < rel_tol) break;
    if (cur.grad_log.lpNorm<Eigen::Infinity>() < 1e-12) break;
  }
  return {x, cur.value};
}

}  // namespace

double nll(const Doe& doe, const KernelSpec& spec) {
  doe.validate();
  spec.validate();
  KernelSpec effective = spec;
  for (int t = 0; t < param_count(spec.family); ++t)
    if (spec.fixed[static_cast<std::size_t>(t)])
      set_param(effective.params, spec.family, t,
                *spec.fixed[static_cast<std::size_t>(t)]);
  Matrix K = kernel_matrix(effective, doe.X);
  auto [L, jitter] = detail::cholesky_with_jitter(K);
  (void)jitter;
  return nll_from_chol(L, doe.y);
}

Rpd fit_mle(const Doe& doe, const KernelSpec& spec, const FitOptions& options,
            RngStream& rng) {
  doe.validate();
  spec.validate();
  const KernelFamily family = spec.family;
  const int T = param_count(family);

  std::vector<int> free_indices;
  KernelParams base = spec.params;
  for (int t = 0; t < T; ++t) {
    const auto& f = spec.fixed[static_cast<std::size_t>(t)];
    if (f)
      set_param(base, family, t, *f);
    else
      free_indices.push_back(t);
  }

  // standardize outputs (zero-mean prior)
  const Index n = doe.n();
  const double mean = doe.y.mean();
  double std_dev = 1.0;
  if (n > 1) {
    double var = (doe.y.array() - mean).square().sum() /
                 static_cast<double>(n - 1);
    std_dev = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  Doe std_doe{doe.X, (doe.y.array() - mean) / std_dev};

  const Index m = static_cast<Index>(free_indices.size());
  Vector lb(m), ub(m);
  for (Index i = 0; i < m; ++i) {
    ParamBounds b = ParamBounds::of(param_kind(family, free_indices[i]));
    lb(i) = std::log(b.lo);
    ub(i) = std::log(b.hi);
  }

  BfgsProblem problem{std_doe.X, std_doe.y, family, base, free_indices};

  bool any_success = false;
  Vector best_x(m);
  double best_f = std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.restarts; ++r) {
    Vector x0(m);
    for (Index i = 0; i < m; ++i)
      x0(i) = std::log(rng.log_uniform(std::exp(lb(i)), std::exp(ub(i))));
    try {
      BfgsOutcome result = minimize_projected_bfgs(
          problem, x0, lb, ub, options.max_iterations, options.rel_tolerance);
      if (!any_success || result.f < best_f) {
        best_f = result.f;
        best_x = result.x;
        any_success = true;
      }
    } catch (const IllConditionedError&) {
      continue;
    }
  }
  if (!any_success)
    throw IllConditionedError("all likelihood restarts failed to factorize");

  Rpd rpd;
  rpd.doe_ = std::move(std_doe);
  rpd.spec_ = spec;
  rpd.spec_.params = problem.assemble(best_x);
  rpd.y_mean_ = mean;
  rpd.y_std_ = std_dev;
  rpd.final_nll_ = best_f;

  Matrix K = kernel_matrix(rpd.spec_, rpd.doe_.X);
  auto [L, jitter] = detail::cholesky_with_jitter(K);
  rpd.chol_ = std::move(L);
  rpd.jitter_ = jitter;
  rpd.alpha_ = rpd.chol_.triangularView<Eigen::Lower>().solve(rpd.doe_.y);
  rpd.chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(rpd.alpha_);
  return rpd;
}

std::pair<double, double> Rpd::predict(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != doe_.dim())
    throw DimensionError("query point dimension mismatch");
  Vector k = kernel_vector(spec_, x, doe_.X);
  const double kxx = spec_.params.c + spec_.params.s2;
  Vector v = chol_.triangularView<Eigen::Lower>().solve(k);
  double mean_std = k.dot(alpha_);
  double var_std = std::max(0.0, kxx - v.squaredNorm());
  return {y_mean_ + y_std_ * mean_std, y_std_ * y_std_ * var_std};
}

}  // namespace abo
