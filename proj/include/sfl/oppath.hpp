#pragma once

#include <functional>
#include <optional>
#include <span>

#include "sfl/matlin.hpp"

namespace sfl {

using MatrixFn = std::function<Matrix(double)>;

/// A path of symmetric matrices A(t) = A_- + B(t), normalized so B(-inf) = 0.
///
/// The evaluators must be pure functions of t. `b_plus`, when present, is
/// the exact limit B(+inf); otherwise it is recovered by integrating B'.
/// `support_hint` is a time beyond which B' is negligible.
class OperatorPath {
 public:
  OperatorPath(SymOp a_minus, MatrixFn b_at, MatrixFn bprime_at, std::optional<Matrix> b_plus,
               double support_hint);

  /// The constant path A(t) = A_-.
  static OperatorPath constant(SymOp a_minus, double support_hint = 1.0);

  Eigen::Index dim() const { return a_minus_.dim(); }
  const SymOp& a_minus() const { return a_minus_; }
  const std::optional<Matrix>& b_plus() const { return b_plus_; }
  double support_hint() const { return support_hint_; }
  bool has_bprime() const { return static_cast<bool>(bprime_at_); }

  /// B(t), checked for shape and symmetry (|B - B^T| <= 1e-10 max(1, |B|)).
  Matrix b(double t) const;
  /// B'(t), same checks. Throws PreconditionError when no derivative was supplied.
  Matrix bprime(double t) const;

  /// Unchecked evaluator access (used by diagnostics that must not throw).
  const MatrixFn& b_evaluator() const { return b_at_; }
  const MatrixFn& bprime_evaluator() const { return bprime_at_; }

 private:
  SymOp a_minus_;
  MatrixFn b_at_;
  MatrixFn bprime_at_;
  std::optional<Matrix> b_plus_;
  double support_hint_;
};

/// Spectral decomposition of A(t) = A_- + B(t).
SymOp a_of(const OperatorPath& path, double t);

/// Result of integrating B' over [-support_hint, support_hint].
struct BprimeIntegral {
  Matrix value;
  double quadrature_error = 0.0;
  /// Estimated contribution of |t| > support_hint, from |B'(+-T)| and |B'(+-2T)|.
  double tail_bound = 0.0;
};

/// Integral of B' over [lo, hi] by matrix adaptive Simpson (abs tol 1e-10).
BprimeIntegral integrate_bprime(const OperatorPath& path, double lo, double hi);

/// A_+ = A_- + B(+inf). Uses b_plus when supplied; otherwise the integral of
/// B' over [-T, T] with T = support_hint. Throws ConvergenceError when the
/// tail estimate exceeds 1e-6 (1 + |integral|).
SymOp asymptote_plus(const OperatorPath& path);

/// The path t -> P A(t) P with P = E_{A_-}((-level, level)), embedded in the
/// full space.
OperatorPath truncate(const OperatorPath& path, double level);

/// Projection E_{A_-}((-level, level)) used by truncate().
Matrix truncation_projection(const SymOp& a_minus, double level);

/// Finite-dimensional diagnostics of the standing hypotheses on a path.
/// The measurability assumption has no finite-dimensional content and is
/// not reported.
struct HypothesisReport {
  double sym_defect_b = 0.0;
  double sym_defect_bprime = 0.0;
  /// Trapezoid estimate over the sample grid of int |B'(t)(|A_-|+I)^{-1}|_1 dt.
  double trace_integral = 0.0;
  /// max over grid of |B(t) - int_{-inf}^t B'|_F.
  double consistency_defect = 0.0;
  /// |A_+ - A_- - int B'|_F.
  double asymptote_gap = 0.0;
};

/// Never throws on numerical defects; they are reported instead.
HypothesisReport hypothesis_report(const OperatorPath& path, std::span<const double> sample_grid);

/// Reparameterized path t -> A(r(t)) with B' scaled by r'(t). `support_hint`
/// is the new hint.
OperatorPath reparameterize(const OperatorPath& path, std::function<double(double)> r,
                            std::function<double(double)> rprime, double support_hint);

}  // namespace sfl
