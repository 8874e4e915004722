#include <doctest.h>

#include "abo/gpr.hpp"
#include "abo/kernels.hpp"
#include "abo/rng.hpp"

using namespace abo;

namespace {
Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("kernel_eval worked values") {
  KernelSpec rbf{KernelFamily::RBF, {1.0, 1.0, 0.0, 1.0}, {}};
  CHECK(kernel_eval(rbf, vec2(0.3, 0.7), vec2(0.3, 0.7)) == doctest::Approx(1.0));
  // r = sqrt(2)
  CHECK(kernel_eval(rbf, vec2(0.0, 0.0), vec2(1.0, 1.0)) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-9));

  KernelSpec mat{KernelFamily::Matern32, {2.0, 0.5, 0.1, 1.0}, {}};
  CHECK(kernel_eval(mat, vec2(0.2, 0.2), vec2(0.2, 0.2)) == doctest::Approx(2.1));
}

TEST_CASE("kernel_eval errors") {
  KernelSpec rbf{KernelFamily::RBF, {1.0, 1.0, 0.0, 1.0}, {}};
  Vector u(2), v(3);
  u.setConstant(0.5);
  v.setConstant(0.5);
  CHECK_THROWS_AS(kernel_eval(rbf, u, v), DimensionError);

  KernelSpec bad{KernelFamily::RBF, {-1.0, 1.0, 0.0, 1.0}, {}};
  CHECK_THROWS_AS(kernel_eval(bad, u, u), ParameterDomainError);
  KernelSpec nan_spec{KernelFamily::RBF,
                      {std::numeric_limits<double>::quiet_NaN(), 1.0, 0.0, 1.0},
                      {}};
  CHECK_THROWS_AS(kernel_eval(nan_spec, u, u), ParameterDomainError);
}

TEST_CASE("fixture mask validation") {
  KernelSpec spec{KernelFamily::RBF, {1.0, 1.0, 0.0, 1.0}, {}};
  spec.fixed[3] = 1.0;  // index 3 invalid for a 3-parameter family
  CHECK_THROWS_AS(spec.validate(), ParameterDomainError);

  KernelSpec rq{KernelFamily::RQ, {1.0, 1.0, 0.0, 1.0}, {}};
  rq.fixed[0] = 1.0;
  rq.fixed[1] = 1.0;
  rq.fixed[2] = 1.0;
  CHECK_THROWS_AS(rq.validate(), ParameterDomainError);
}

TEST_CASE("kernel_matrix worked values and symmetry") {
  KernelSpec rbf{KernelFamily::RBF, {1.0, 1.0, 0.0, 1.0}, {}};
  Matrix X1(1, 2);
  X1 << 0.4, 0.6;
  Matrix K1 = kernel_matrix(rbf, X1);
  CHECK(K1.rows() == 1);
  CHECK(K1(0, 0) == doctest::Approx(1.0));

  // duplicated rows couple only through the base kernel, noise stays diagonal
  KernelSpec noisy{KernelFamily::RBF, {1.0, 1.0, 0.5, 1.0}, {}};
  Matrix X2(2, 2);
  X2 << 0.3, 0.3, 0.3, 0.3;
  Matrix K2 = kernel_matrix(noisy, X2);
  CHECK(K2(0, 0) == doctest::Approx(1.5));
  CHECK(K2(1, 1) == doctest::Approx(1.5));
  CHECK(K2(0, 1) == doctest::Approx(1.0));
  CHECK(K2(1, 0) == doctest::Approx(1.0));

  RngStream rng(11, "kernels");
  Matrix X(7, 3);
  for (Index i = 0; i < X.size(); ++i) X(i / 3, i % 3) = rng.uniform();
  KernelSpec rq{KernelFamily::RQ, {1.3, 0.4, 0.01, 0.7}, {}};
  Matrix K = kernel_matrix(rq, X);
  CHECK(K == K.transpose());
}

TEST_CASE("kernel_vector follows the value-identity convention") {
  KernelSpec rbf{KernelFamily::RBF, {1.0, 1.0, 0.0, 1.0}, {}};
  Matrix X(1, 2);
  X << 0.2, 0.8;
  Vector k = kernel_vector(rbf, vec2(0.2, 0.8), X);
  CHECK(k(0) == doctest::Approx(1.0));

  Vector k2 = kernel_vector(rbf, vec2(1.2, 1.8), X);
  CHECK(k2(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));

  Matrix X3(3, 2);
  X3 << 0.5, 0.5, 0.5, 0.5, 0.5, 0.5;
  Vector k3 = kernel_vector(rbf, vec2(0.1, 0.9), X3);
  CHECK(k3(0) == k3(1));
  CHECK(k3(1) == k3(2));

  // a query equal to a training row picks up the noise term
  KernelSpec noisy{KernelFamily::Matern32, {1.0, 1.0, 0.25, 1.0}, {}};
  Vector k4 = kernel_vector(noisy, vec2(0.5, 0.5), X3);
  CHECK(k4(0) == doctest::Approx(1.25));
}

TEST_CASE("positive semi-definiteness with noise: Cholesky succeeds") {
  RngStream rng(3, "psd");
  for (int trial = 0; trial < 5; ++trial) {
    Matrix X(12, 2);
    for (Index i = 0; i < 12; ++i)
      for (Index d = 0; d < 2; ++d) X(i, d) = rng.uniform();
    for (KernelFamily family :
         {KernelFamily::RBF, KernelFamily::Matern32, KernelFamily::RQ}) {
      KernelSpec spec{family, {1.0, 0.5, 0.01, 1.5}, {}};
      Matrix K = kernel_matrix(spec, X);
      CHECK_NOTHROW(detail::cholesky_with_jitter(K));
    }
  }
}

TEST_CASE("rq approaches rbf for large alpha") {
  for (double c : {0.1, 1.0, 10.0}) {
    for (double lambda : {0.1, 1.0, 10.0}) {
      KernelSpec rbf{KernelFamily::RBF, {c, lambda, 0.0, 1.0}, {}};
      KernelSpec rq{KernelFamily::RQ, {c, lambda, 0.0, 1e6}, {}};
      for (double r = 0.0; r <= 3.0; r += 0.25) {
        Vector u = vec2(0.0, 0.0), v = vec2(r, 0.0);
        CHECK(std::abs(kernel_eval(rq, u, v) - kernel_eval(rbf, u, v)) < 1e-4);
      }
    }
  }
}

TEST_CASE("stationarity: translation leaves values unchanged") {
  RngStream rng(5, "stationary");
  for (KernelFamily family :
       {KernelFamily::RBF, KernelFamily::Matern32, KernelFamily::RQ}) {
    KernelSpec spec{family, {0.8, 0.6, 0.05, 2.0}, {}};
    for (int trial = 0; trial < 20; ++trial) {
      Vector u = vec2(rng.uniform(), rng.uniform());
      Vector v = vec2(rng.uniform(), rng.uniform());
      Vector shift = vec2(rng.uniform(-3, 3), rng.uniform(-3, 3));
      const double base = kernel_eval(spec, u, v);
      const double moved = kernel_eval(spec, u + shift, v + shift);
      CHECK(base == doctest::Approx(moved).epsilon(1e-12));
    }
  }
}

TEST_CASE("family parameter order") {
  CHECK(param_count(KernelFamily::RBF) == 3);
  CHECK(param_count(KernelFamily::Matern32) == 3);
  CHECK(param_count(KernelFamily::RQ) == 4);
  CHECK(std::string(param_name(KernelFamily::RBF, 0)) == "c");
  CHECK(std::string(param_name(KernelFamily::RBF, 1)) == "lambda");
  CHECK(std::string(param_name(KernelFamily::RBF, 2)) == "s2");
  CHECK(std::string(param_name(KernelFamily::RQ, 1)) == "alpha");
  CHECK(std::string(param_name(KernelFamily::RQ, 2)) == "lambda");
  CHECK(std::string(param_name(KernelFamily::RQ, 3)) == "s2");
}
