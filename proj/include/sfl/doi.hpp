#pragma once

#include <vector>

#include "sfl/matlin.hpp"

namespace sfl {

/// Fourier transform of zeta(x) = 1/(e^{x/2} + e^{-x/2}): pi sech(pi s).
double zeta_hat(double s);

/// psi(l, m) = ((l^2+1)(m^2+1))^{1/4} / ((l^2+1)^{1/2} + (m^2+1)^{1/2}).
double psi_eval(double lambda, double mu);

/// (g(l) - g(m)) / (alpha(l) (l - m) alpha(m)), alpha(x) = (x^2+1)^{-1/4}.
/// Within 1e-6 of the diagonal the split form phi_split() is used instead.
double phi_eval(double lambda, double mu);

/// psi (1 + (1 - l m) / ((l^2+1)^{1/2} (m^2+1)^{1/2})), equal to phi everywhere.
double phi_split(double lambda, double mu);

/// Composite Gauss-Legendre rule on [-s_max, s_max] with zeta_hat sampled at the nodes.
struct DOIQuadrature {
  double s_max = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> zeta_hat_values;

  /// Mass of zeta_hat outside [-s_max, s_max] is below this bound.
  double tail_bound() const;
};

/// `nodes` must be a positive multiple of 10.
DOIQuadrature make_doi_quadrature(double s_max = 8.0, int nodes = 400);

/// Rule whose tail bound is below `tol`: s_max >= 8, about 25 nodes per unit length.
DOIQuadrature doi_quadrature_for(double tol);

/// K = (A_+^2 + I)^{-1/4} (A_+ - A_-) (A_-^2 + I)^{-1/4}.
Matrix k_operator(const SymOp& a_plus, const SymOp& a_minus);

/// (1/2pi) sum_s w_s zeta_hat(s) (A_+^2 + I)^{is/2} K (A_-^2 + I)^{-is/2}.
/// Throws PreconditionError when the rule's tail bound exceeds `tail_tol`.
Matrix t_psi(const SymOp& a_plus, const SymOp& a_minus, const Matrix& k, const DOIQuadrature& quad,
             double tail_tol = 1e-9);

/// T_psi(K) + (A_+^2+I)^{-1/2} T_psi(K) (A_-^2+I)^{-1/2} - g(A_+) T_psi(K) g(A_-).
Matrix t_phi(const SymOp& a_plus, const SymOp& a_minus, const Matrix& k, const DOIQuadrature& quad,
             double tail_tol = 1e-9);

struct DOIResult {
  Matrix value;
  /// Trace norm of value - (g(A_+) - g(A_-)).
  double residual = 0.0;
};

/// g(A_+) - g(A_-) as T_phi(K). Throws PreconditionError for tol < 1e-10.
DOIResult g_diff_via_doi(const SymOp& a_plus, const SymOp& a_minus, double tol = 1e-9);
DOIResult g_diff_via_doi(const SymOp& a_plus, const SymOp& a_minus, const DOIQuadrature& quad,
                         double tail_tol = 1e-9);

}  // namespace sfl
