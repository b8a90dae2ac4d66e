#include <cmath>
#include <vector>

#include "doctest.h"
#include "sfl/error.hpp"
#include "sfl/oppath.hpp"
#include "sfl/scenarios.hpp"
#include "test_support.hpp"

using namespace sfl;

namespace {

Matrix identity2() { return Matrix::Identity(2, 2); }

// tanh2 without the exact limit, so the asymptote has to be integrated.
OperatorPath tanh2_no_limit() {
  return OperatorPath(eig_sym(-identity2()), [](double t) { return Matrix((1.0 + std::tanh(t)) * identity2()); },
                      [](double t) {
                        const double c = 1.0 / std::cosh(t);
                        return Matrix(c * c * identity2());
                      },
                      std::nullopt, 12.0);
}

}  // namespace

TEST_CASE("constant path") {
  std::mt19937_64 rng(1);
  const SymOp a = eig_sym(testing::random_symmetric(rng, 4));
  const OperatorPath p = OperatorPath::constant(a);
  CHECK(p.b(3.0).norm() == 0.0);
  CHECK((asymptote_plus(p).entries() - a.entries()).norm() < 1e-14);
  CHECK((a_of(p, -5.0).entries() - a.entries()).norm() < 1e-14);
}

TEST_CASE("tanh2 evaluation and limits") {
  const OperatorPath p = scenarios::tanh2();
  CHECK(p.b(0.0)(0, 0) == doctest::Approx(1.0));
  CHECK(a_of(p, 0.0).spectrum().cwiseAbs().maxCoeff() < 1e-15);
  CHECK((asymptote_plus(p).entries() - identity2()).norm() < 1e-14);
}

TEST_CASE("integrated B' recovers the asymptote") {
  const OperatorPath p = tanh2_no_limit();
  const BprimeIntegral integral = integrate_bprime(p, -20.0, 20.0);
  CHECK(integral.value(0, 0) == doctest::Approx(2.0 * std::tanh(20.0)).epsilon(1e-10));
  CHECK(integral.value(0, 1) == doctest::Approx(0.0));
  const SymOp plus = asymptote_plus(p);
  CHECK((plus.entries() - identity2()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("slowly decaying B' is rejected") {
  const OperatorPath p(eig_sym(-identity2()), [](double t) { return Matrix(std::atan(t) * identity2()); },
                       [](double t) { return Matrix(identity2() / (1.0 + t * t)); }, std::nullopt, 1.0);
  CHECK_THROWS_AS(asymptote_plus(p), ConvergenceError);
}

TEST_CASE("asymmetric B is rejected") {
  const OperatorPath p(eig_sym(identity2()), [](double) { return Matrix((Matrix(2, 2) << 0, 1, 0, 0).finished()); },
                       nullptr, std::nullopt, 1.0);
  CHECK_THROWS_AS(p.b(0.0), AsymmetryError);
  CHECK_THROWS_AS(p.bprime(0.0), PreconditionError);
}

TEST_CASE("wrong shape is rejected") {
  const OperatorPath p(eig_sym(identity2()), [](double) { return Matrix(Matrix::Zero(3, 3)); }, nullptr,
                       std::nullopt, 1.0);
  CHECK_THROWS_AS(p.b(0.0), PreconditionError);
}

TEST_CASE("truncation projection keeps the window") {
  const Matrix a = Vector((Vector(4) << -3, -0.5, 0.5, 2).finished()).asDiagonal();
  const Matrix p = truncation_projection(eig_sym(a), 1.0);
  CHECK(p.trace() == doctest::Approx(2.0));
  CHECK(p(0, 0) == doctest::Approx(0.0));
  CHECK(p(1, 1) == doctest::Approx(1.0));
  const OperatorPath full = OperatorPath::constant(eig_sym(a));
  const OperatorPath cut = truncate(full, 1.0);
  CHECK(cut.a_minus().entries()(3, 3) == doctest::Approx(0.0));
  CHECK(cut.a_minus().entries()(2, 2) == doctest::Approx(0.5));
}

TEST_CASE("hypothesis report on tanh2") {
  const OperatorPath p = scenarios::tanh2();
  std::vector<double> grid;
  for (int k = 0; k <= 800; ++k) grid.push_back(-20.0 + 0.05 * k);
  const HypothesisReport r = hypothesis_report(p, grid);
  CHECK(r.sym_defect_b == 0.0);
  CHECK(r.sym_defect_bprime == 0.0);
  // int |B'| (|A_-| + 1)^{-1} trace norm = 2 * 2 / 2
  CHECK(r.trace_integral == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(r.consistency_defect < 1e-8);
  CHECK(r.asymptote_gap < 1e-8);
}

TEST_CASE("reparameterization composes the evaluators") {
  const OperatorPath p = scenarios::tanh2();
  const OperatorPath q = reparameterize(
      p, [](double t) { return 2.0 * t + 1.0; }, [](double) { return 2.0; }, 12.0);
  CHECK((q.b(0.5) - p.b(2.0)).norm() < 1e-15);
  CHECK((q.bprime(0.5) - 2.0 * p.bprime(2.0)).norm() < 1e-15);
}
