#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "sfl/matlin.hpp"
#include "sfl/step_function.hpp"

namespace sfl {

/// g(x) = x (x^2 + 1)^{-1/2} and its inverse on (-1, 1).
double g_fn(double x);
double g_inverse(double omega);
/// g_z(x) = x (x^2 - z)^{-1/2}, principal branch (Re sqrt > 0).
Complex gz_fn(double x, Complex z);

/// #{first <= lambda} - #{second <= lambda} as a step function; values closer
/// than `cluster_tol` form a single breakpoint.
StepFunction counting_difference(const Vector& first, const Vector& second, double cluster_tol);

/// Spectral shift function of the pair from eigenvalue counting:
/// xi(lambda) = #{eig(A_-) <= lambda} - #{eig(A_+) <= lambda}.
/// Eigenvalues of the two operators closer than 64 eps (1 + |A|) are treated
/// as one breakpoint.
StepFunction xi_counting(const SymOp& a_plus, const SymOp& a_minus);

/// Same function built through the invariance principle: count for the
/// pair (g(A_+), g(A_-)) and pull breakpoints back through g^{-1}.
StepFunction xi_invariance(const SymOp& a_plus, const SymOp& a_minus);

/// ln det(A_+ - z) - ln det(A_- - z), each term the principal log-determinant.
Complex log_pert_det_unwrapped(const SymOp& a_plus, const SymOp& a_minus, Complex z);

/// Perturbation determinant det((A_+ - z)(A_- - z)^{-1}). Throws
/// PreconditionError when z lies on either spectrum.
Complex pert_det(const SymOp& a_plus, const SymOp& a_minus, Complex z);

/// det(I + (A_+ - A_-)(A_- - z)^{-1}); the second route used as a cross-check.
Complex pert_det_direct(const SymOp& a_plus, const SymOp& a_minus, Complex z);

struct BranchTrace {
  std::vector<std::pair<Complex, Complex>> waypoints;  // (z, ln D(z))
  Complex target;
  double total_arg = 0.0;
  /// Height Y of the starting point i Y.
  double start_height = 0.0;

  Complex logdet() const { return waypoints.back().second; }
};

/// Continues ln D(z) from i Y (where the principal value is below 1e-6 in
/// modulus) along the straight segment to `target`, halving steps until each
/// increment has argument below pi/2 and agrees with two half steps.
/// Throws ConvergenceError past 10^6 steps.
BranchTrace logdet_branch(const SymOp& a_plus, const SymOp& a_minus, Complex target);

/// The starting height used by logdet_branch().
double branch_start_height(const SymOp& a_plus, const SymOp& a_minus);

/// pi^{-1} Im ln D(lambda + i eps) on the continued branch.
double xi_from_det(const SymOp& a_plus, const SymOp& a_minus, double lambda, double eps);

/// Left- and right-hand sides of a trace identity and their distance.
struct TraceCheck {
  Complex lhs;
  Complex rhs;
  double residual = 0.0;
};

/// |tr(f(A_+) - f(A_-)) - int f' xi|, integral by adaptive quadrature per step.
TraceCheck krein_residual(const SymOp& a_plus, const SymOp& a_minus,
                          const std::function<double(double)>& f,
                          const std::function<double(double)>& fprime);

/// -tr((A_+ - z)^{-1} - (A_- - z)^{-1}) against the closed-form step integral
/// sum v_k [(b_k - z)^{-1} - (b_{k+1} - z)^{-1}].
TraceCheck resolvent_trace_residual(const SymOp& a_plus, const SymOp& a_minus, Complex z);

/// tr(g_z(A_+) - g_z(A_-)) against -z int xi(nu) (nu^2 - z)^{-3/2} dnu (quadrature).
TraceCheck gz_trace_residual(const SymOp& a_plus, const SymOp& a_minus, Complex z);

/// Central difference in z of tr(g_z(A_+) - g_z(A_-)) against
/// (1/2) tr(A_+(A_+^2 - z)^{-3/2} - A_-(A_-^2 - z)^{-3/2}).
TraceCheck dz_trace_residual(const SymOp& a_plus, const SymOp& a_minus, Complex z, double h);

/// tr g_z(A).
Complex gz_trace(const SymOp& a, Complex z);

}  // namespace sfl
