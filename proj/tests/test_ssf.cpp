#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sfl/error.hpp"
#include "sfl/ssf.hpp"
#include "test_support.hpp"

using namespace sfl;

namespace {

SymOp diag(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return eig_sym(v.asDiagonal().toDenseMatrix());
}

struct Pair {
  SymOp plus;
  SymOp minus;
};

Pair random_pair(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix a = testing::random_symmetric(rng, n);
  const Matrix b = testing::random_symmetric(rng, n, 0.5);
  return {eig_sym(a + b), eig_sym(a)};
}

}  // namespace

TEST_CASE("g and its inverse") {
  CHECK(g_fn(0.0) == 0.0);
  CHECK(g_fn(1.0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  for (double x : {-50.0, -1.0, 0.3, 7.0}) CHECK(g_inverse(g_fn(x)) == doctest::Approx(x).epsilon(1e-12));
  CHECK_THROWS_AS(g_inverse(1.0), DomainError);
  CHECK_THROWS_AS(g_inverse(-1.5), DomainError);
}

TEST_CASE("xi for the tanh2 asymptotes") {
  const StepFunction xi = xi_counting(diag({1, 1}), diag({-1, -1}));
  CHECK(xi(-1.5) == 0.0);
  CHECK(xi(-1.0) == 2.0);
  CHECK(xi(0.0) == 2.0);
  CHECK(xi(1.0) == 0.0);
  CHECK(approx_equal(xi, xi_invariance(diag({1, 1}), diag({-1, -1})), 1e-12));
}

TEST_CASE("xi of random pairs: integer, compact, first moment") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const Pair p = random_pair(rng, 1 + trial % 10);
    const StepFunction xi = xi_counting(p.plus, p.minus);
    CHECK(xi.is_integer_valued());
    CHECK(xi.has_compact_support());
    // int xi = tr(A_+ - A_-)
    const double first = xi.integrate_with_primitive([](double x) { return x; });
    CHECK(first == doctest::Approx((p.plus.entries() - p.minus.entries()).trace()).epsilon(1e-12));
    CHECK(approx_equal(xi, xi_invariance(p.plus, p.minus), 1e-10));
  }
}

TEST_CASE("counting_difference clusters coincident eigenvalues") {
  Vector a(3);
  a << 0.0, 1.0, 1.0 + 1e-17;
  Vector b(1);
  b << 1.0;
  const StepFunction f = counting_difference(a, b, 1e-12);
  CHECK(f(0.5) == 1.0);
  CHECK(f(1.0) == 2.0);
  CHECK(f.breakpoints().size() == 2);
}

TEST_CASE("perturbation determinant: ratio against direct form") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Pair p = random_pair(rng, 2 + trial % 7);
    const Complex z(0.3 * trial - 2.0, 0.5 + 0.1 * trial);
    const Complex ratio = pert_det(p.plus, p.minus, z);
    const Complex direct = pert_det_direct(p.plus, p.minus, z);
    CHECK(std::abs(ratio - direct) < 1e-10 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("perturbation determinant rejects z in the spectrum") {
  CHECK_THROWS_AS(pert_det(diag({1.0}), diag({2.0}), Complex(2.0, 0.0)), PreconditionError);
}

TEST_CASE("branch start height normalizes the log") {
  const SymOp plus = diag({1, 1});
  const SymOp minus = diag({-1, -1});
  const double y = branch_start_height(plus, minus);
  CHECK(y >= 30.0);
  const BranchTrace trace = logdet_branch(plus, minus, Complex(0.0, 1e-4));
  CHECK(std::abs(trace.waypoints.front().second) < 1e-6);
  // D(i eps) = ((1 - i eps)/(-1 - i eps))^2, argument 2 pi - 4 arctan(eps) on the continued branch.
  CHECK(trace.logdet().imag() == doctest::Approx(2.0 * std::numbers::pi - 4.0 * std::atan(1e-4)).epsilon(1e-10));
}

TEST_CASE("xi from the determinant matches counting away from eigenvalues") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  for (int trial = 0; trial < 15; ++trial) {
    const Pair p = random_pair(rng, 2 + trial % 6);
    const StepFunction xi = xi_counting(p.plus, p.minus);
    double lambda = uni(rng);
    double dist = 1e300;
    for (const SymOp* op : {&p.plus, &p.minus}) {
      for (double e : op->spectrum()) dist = std::min(dist, std::abs(e - lambda));
    }
    if (dist < 0.05) continue;
    const double eps = 1e-6;
    CHECK(xi_from_det(p.plus, p.minus, lambda, eps) == doctest::Approx(xi(lambda)).epsilon(1e-3));
  }
}

TEST_CASE("xi_from_det needs a positive offset") {
  CHECK_THROWS_AS(xi_from_det(diag({1.0}), diag({-1.0}), 0.0, 0.0), PreconditionError);
}

TEST_CASE("trace identities on random pairs") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const Pair p = random_pair(rng, 1 + trial);
    const TraceCheck k = krein_residual(
        p.plus, p.minus, [](double x) { return std::exp(-x * x); },
        [](double x) { return -2.0 * x * std::exp(-x * x); });
    CHECK(k.residual < 1e-10);
    const TraceCheck r = resolvent_trace_residual(p.plus, p.minus, Complex(0.5, 1.0));
    CHECK(r.residual < 1e-11);
    const TraceCheck g = gz_trace_residual(p.plus, p.minus, Complex(-3.0, 2.0));
    CHECK(g.residual < 1e-9);
  }
}

TEST_CASE("g_z identity rejects z on the positive axis") {
  CHECK_THROWS_AS(gz_trace_residual(diag({1.0}), diag({-1.0}), Complex(1.0, 0.0)), PreconditionError);
}

TEST_CASE("derivative identity converges at second order") {
  const SymOp plus = diag({1.0, 2.0});
  const SymOp minus = diag({-1.0, 0.5});
  const double coarse = dz_trace_residual(plus, minus, Complex(-1.0, 0.0), 1e-2).residual;
  const double fine = dz_trace_residual(plus, minus, Complex(-1.0, 0.0), 5e-3).residual;
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("gz_trace on a scalar") {
  const Complex z(-4.0, 0.0);
  CHECK(std::abs(gz_trace(diag({3.0}), z) - 3.0 / std::sqrt(13.0)) < 1e-15);
}
