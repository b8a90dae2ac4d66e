#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sfl/matlin.hpp"

namespace sfl::quad {

/// Integral of a scalar function over [a, b]; either bound may be infinite.
/// Finite intervals use adaptive Gauss-Kronrod (31 points), half-infinite
/// intervals exp-sinh and the real line sinh-sinh.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-13);
Complex integrate_complex(const std::function<Complex(double)>& f, double a, double b,
                          double rel_tol = 1e-13);

/// Adaptive Simpson rule for matrix-valued integrands. Convergence is judged
/// by the Frobenius norm of the Richardson difference against `abs_tol`.
struct MatrixIntegral {
  Matrix value;
  double error_estimate = 0.0;
  int evaluations = 0;
};
MatrixIntegral adaptive_simpson(const std::function<Matrix(double)>& f, double a, double b,
                                double abs_tol, int max_depth = 40);

/// Composite Gauss-Legendre rule: `panels` equal panels of 10 nodes each.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Rule gauss_legendre_panels(double a, double b, int panels);

/// Composite trapezoid rule on an arbitrary ascending grid of samples.
double trapezoid(std::span<const double> x, std::span<const double> y);

/// Pairwise (cascade) summation; fixed association order for reproducibility.
template <typename T>
T pairwise_sum(std::span<const T> terms) {
  if (terms.empty()) return T{};
  if (terms.size() == 1) return terms[0];
  const std::size_t half = terms.size() / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

}  // namespace sfl::quad
