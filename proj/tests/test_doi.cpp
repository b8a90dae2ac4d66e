#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sfl/doi.hpp"
#include "sfl/error.hpp"
#include "sfl/ssf.hpp"
#include "test_support.hpp"

using namespace sfl;

namespace {

SymOp scalar(double x) { return eig_sym(Matrix::Constant(1, 1, x)); }

// Riemann sum of int zeta(x) e^{-isx} dx; zeta decays like e^{-|x|/2}.
double zeta_fourier(double s) {
  const double h = 1e-3;
  double total = 0.0;
  for (double x = -80.0; x <= 80.0; x += h) total += std::cos(s * x) / (std::exp(0.5 * x) + std::exp(-0.5 * x));
  return total * h;
}

}  // namespace

TEST_CASE("zeta_hat is the Fourier transform of zeta") {
  CHECK(zeta_hat(0.0) == doctest::Approx(std::numbers::pi));
  CHECK(zeta_hat(1.0) == doctest::Approx(0.2710151).epsilon(1e-6));
  CHECK(zeta_hat(-0.7) == zeta_hat(0.7));
  for (double s : {0.0, 0.3, 1.0, 2.5}) CHECK(std::abs(zeta_hat(s) - zeta_fourier(s)) < 1e-6);
}

TEST_CASE("psi kernel") {
  CHECK(psi_eval(0.0, 0.0) == 0.5);
  const double expected = std::pow(10.0, 0.25) * std::pow(2.0, 0.25) / (std::sqrt(10.0) + std::sqrt(2.0));
  CHECK(psi_eval(3.0, 1.0) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(psi_eval(3.0, 1.0) == doctest::Approx(0.4620882).epsilon(1e-6));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 5.0);
  for (int i = 0; i < 50; ++i) {
    const double a = normal(rng);
    const double b = normal(rng);
    CHECK(psi_eval(a, b) == psi_eval(b, a));
    CHECK(psi_eval(a, b) > 0.0);
    CHECK(psi_eval(a, b) <= 0.5);
  }
}

TEST_CASE("phi kernel") {
  CHECK(phi_eval(0.0, 0.0) == doctest::Approx(1.0));
  // (g(3) - g(1)) / (alpha(3) * 2 * alpha(1))
  const double num = 3.0 / std::sqrt(10.0) - 1.0 / std::sqrt(2.0);
  const double den = std::pow(10.0, -0.25) * 2.0 * std::pow(2.0, -0.25);
  CHECK(phi_eval(3.0, 1.0) == doctest::Approx(num / den).epsilon(1e-14));
  CHECK(phi_eval(3.0, 1.0) == doctest::Approx(0.2554361).epsilon(1e-6));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double a = normal(rng);
    const double b = normal(rng);
    CHECK(std::abs(phi_eval(a, b) - phi_split(a, b)) < 1e-12);
  }
  // Diagonal limit g'(l) (l^2 + 1)^{1/2}
  CHECK(phi_eval(2.0, 2.0 + 1e-9) == doctest::Approx(std::pow(5.0, -1.5) * std::sqrt(5.0)).epsilon(1e-8));
}

TEST_CASE("K operator") {
  CHECK(k_operator(scalar(1.0), scalar(3.0)).norm() > 0.0);
  CHECK(k_operator(scalar(3.0), scalar(1.0))(0, 0) == doctest::Approx(2.0 * std::pow(20.0, -0.25)));
  std::mt19937_64 rng(3);
  const SymOp a = eig_sym(testing::random_symmetric(rng, 5));
  CHECK(k_operator(a, a).cwiseAbs().maxCoeff() < 1e-15);
  for (int i = 0; i < 20; ++i) {
    const SymOp am = eig_sym(testing::random_symmetric(rng, 5));
    const SymOp ap = eig_sym(am.entries() + testing::random_symmetric(rng, 5, 0.3));
    const Matrix k = k_operator(ap, am);
    const Matrix weight = apply_fn(am, [](double x) { return std::pow(x * x + 1.0, -0.5); });
    const double bound = operator_norm(Matrix((ap.entries() - am.entries()) * weight)) *
                         operator_norm(Matrix(apply_fn(ap, [](double x) { return std::pow(x * x + 1.0, -0.25); }) *
                                              apply_fn(am, [](double x) { return std::pow(x * x + 1.0, 0.25); })));
    CHECK(operator_norm(k) <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("quadrature construction") {
  const DOIQuadrature q = make_doi_quadrature();
  CHECK(q.nodes.size() == 400);
  CHECK(q.tail_bound() < 1e-9);
  for (double w : q.weights) CHECK(w > 0.0);
  CHECK_THROWS_AS(make_doi_quadrature(8.0, 35), PreconditionError);
  const DOIQuadrature tight = doi_quadrature_for(1e-10);
  CHECK(tight.tail_bound() < 1e-10);
}

TEST_CASE("T_psi on scalars is multiplication by psi") {
  const DOIQuadrature q = make_doi_quadrature();
  const Matrix k = Matrix::Constant(1, 1, 0.7);
  CHECK(t_psi(scalar(3.0), scalar(1.0), k, q)(0, 0) == doctest::Approx(psi_eval(3.0, 1.0) * 0.7).epsilon(1e-10));
  CHECK(t_psi(scalar(3.0), scalar(1.0), Matrix::Zero(1, 1), q)(0, 0) == 0.0);
}

TEST_CASE("T_psi is the psi Schur multiplier in the eigenbases") {
  std::mt19937_64 rng(4);
  const DOIQuadrature q = make_doi_quadrature();
  for (int trial = 0; trial < 5; ++trial) {
    const SymOp ap = eig_sym(testing::random_symmetric(rng, 4, 2.0));
    const SymOp am = eig_sym(testing::random_symmetric(rng, 4, 2.0));
    const Matrix k = testing::random_matrix(rng, 4, 4);
    const Matrix kt = ap.basis().transpose() * k * am.basis();
    Matrix schur(4, 4);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) schur(i, j) = psi_eval(ap.spectrum()(i), am.spectrum()(j)) * kt(i, j);
    }
    const Matrix oracle = ap.basis() * schur * am.basis().transpose();
    CHECK((t_psi(ap, am, k, q) - oracle).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("T_psi refuses a quadrature with a heavy tail") {
  const DOIQuadrature q = make_doi_quadrature(2.0, 100);
  CHECK_THROWS_AS(t_psi(scalar(1.0), scalar(2.0), Matrix::Ones(1, 1), q), PreconditionError);
}

TEST_CASE("g difference via the double operator integral") {
  const DOIQuadrature q = make_doi_quadrature();
  const DOIResult scalar_case = g_diff_via_doi(scalar(3.0), scalar(1.0), q);
  CHECK(scalar_case.value(0, 0) == doctest::Approx(g_fn(3.0) - g_fn(1.0)).epsilon(1e-9));
  CHECK(scalar_case.residual < 1e-8);
  CHECK(g_diff_via_doi(scalar(2.0), scalar(2.0), q).residual == 0.0);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const SymOp am = eig_sym(testing::random_symmetric(rng, 6));
    Matrix b = testing::random_symmetric(rng, 6);
    b /= operator_norm(b);
    const SymOp ap = eig_sym(am.entries() + b);
    CHECK(g_diff_via_doi(ap, am, q).residual < 1e-6);
  }
  CHECK_THROWS_AS(g_diff_via_doi(scalar(1.0), scalar(2.0), 1e-12), PreconditionError);
}

TEST_CASE("T_phi is bounded by 3 |psi| on the trace class") {
  std::mt19937_64 rng(6);
  const DOIQuadrature q = make_doi_quadrature();
  for (int trial = 0; trial < 20; ++trial) {
    const SymOp ap = eig_sym(testing::random_symmetric(rng, 5, 3.0));
    const SymOp am = eig_sym(testing::random_symmetric(rng, 5, 3.0));
    const Matrix k = testing::random_matrix(rng, 5, 5);
    CHECK(trace_norm(t_phi(ap, am, k, q)) <= 1.5 * trace_norm(k));
  }
}

TEST_CASE("residual shrinks as the quadrature is refined") {
  std::mt19937_64 rng(7);
  const SymOp am = eig_sym(testing::random_symmetric(rng, 5, 2.0));
  const SymOp ap = eig_sym(am.entries() + testing::random_symmetric(rng, 5, 0.3));
  const double coarse = g_diff_via_doi(ap, am, make_doi_quadrature(4.0, 40), 1.0).residual;
  const double fine = g_diff_via_doi(ap, am, make_doi_quadrature(8.0, 400)).residual;
  CHECK(fine < coarse);
}
