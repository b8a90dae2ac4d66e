#include "sfl/doi.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "sfl/error.hpp"
#include "sfl/quadrature.hpp"
#include "sfl/ssf.hpp"

namespace sfl {

double zeta_hat(double s) { return std::numbers::pi / std::cosh(std::numbers::pi * s); }

double psi_eval(double lambda, double mu) {
  const double a = std::sqrt(lambda * lambda + 1.0);
  const double b = std::sqrt(mu * mu + 1.0);
  return std::sqrt(a * b) / (a + b);
}

double phi_split(double lambda, double mu) {
  const double a = std::sqrt(lambda * lambda + 1.0);
  const double b = std::sqrt(mu * mu + 1.0);
  return psi_eval(lambda, mu) * (1.0 + (1.0 - lambda * mu) / (a * b));
}

double phi_eval(double lambda, double mu) {
  if (std::abs(lambda - mu) < 1e-6) return phi_split(lambda, mu);
  const double alpha_l = std::pow(lambda * lambda + 1.0, -0.25);
  const double alpha_m = std::pow(mu * mu + 1.0, -0.25);
  return (g_fn(lambda) - g_fn(mu)) / (alpha_l * (lambda - mu) * alpha_m);
}

double DOIQuadrature::tail_bound() const { return 2.0 * zeta_hat(s_max); }

DOIQuadrature make_doi_quadrature(double s_max, int nodes) {
  if (!(s_max > 0.0)) throw PreconditionError("DOI quadrature: s_max must be positive");
  if (nodes <= 0 || nodes % 10 != 0) {
    throw PreconditionError("DOI quadrature: node count must be a positive multiple of 10");
  }
  const quad::Rule rule = quad::gauss_legendre_panels(-s_max, s_max, nodes / 10);
  DOIQuadrature q;
  q.s_max = s_max;
  q.nodes = rule.nodes;
  q.weights = rule.weights;
  q.zeta_hat_values.reserve(q.nodes.size());
  for (double s : q.nodes) q.zeta_hat_values.push_back(zeta_hat(s));
  return q;
}

DOIQuadrature doi_quadrature_for(double tol) {
  // 2 pi sech(pi s) <= 4 pi e^{-pi s}
  double s_max = std::max(8.0, std::log(4.0 * std::numbers::pi / tol) / std::numbers::pi);
  s_max = std::ceil(s_max * 2.0) / 2.0;
  const int nodes = 10 * static_cast<int>(std::ceil(5.0 * s_max));
  return make_doi_quadrature(s_max, nodes);
}

Matrix k_operator(const SymOp& a_plus, const SymOp& a_minus) {
  if (a_plus.dim() != a_minus.dim()) throw PreconditionError("k_operator: dimension mismatch");
  auto quarter = [](double x) { return std::pow(x * x + 1.0, -0.25); };
  return apply_fn(a_plus, quarter) * (a_plus.entries() - a_minus.entries()) * apply_fn(a_minus, quarter);
}

Matrix t_psi(const SymOp& a_plus, const SymOp& a_minus, const Matrix& k, const DOIQuadrature& quad,
             double tail_tol) {
  if (a_plus.dim() != a_minus.dim() || k.rows() != a_plus.dim() || k.cols() != a_minus.dim()) {
    throw PreconditionError("t_psi: dimension mismatch");
  }
  if (quad.tail_bound() >= tail_tol) {
    std::ostringstream msg;
    msg << "t_psi: quadrature tail " << quad.tail_bound() << " exceeds " << tail_tol;
    throw PreconditionError(msg.str());
  }
  const Eigen::Index n = a_plus.dim();
  const Vector lp = (a_plus.spectrum().array().square() + 1.0).log() * 0.5;
  const Vector lm = (a_minus.spectrum().array().square() + 1.0).log() * 0.5;
  const ComplexMatrix vp = a_plus.basis().cast<Complex>();
  const ComplexMatrix vm = a_minus.basis().cast<Complex>();
  const ComplexMatrix kc = k.cast<Complex>();

  std::vector<ComplexMatrix> terms;
  terms.reserve(quad.nodes.size());
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
    const double s = quad.nodes[i];
    Eigen::VectorXcd dp(n);
    Eigen::VectorXcd dm(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      dp(j) = std::polar(1.0, s * lp(j));
      dm(j) = std::polar(1.0, -s * lm(j));
    }
    const ComplexMatrix left = vp * dp.asDiagonal() * vp.transpose();
    const ComplexMatrix right = vm * dm.asDiagonal() * vm.transpose();
    terms.push_back((quad.weights[i] * quad.zeta_hat_values[i]) * (left * kc * right));
  }
  // Pairwise reduction keeps the summation order fixed.
  while (terms.size() > 1) {
    std::vector<ComplexMatrix> next;
    next.reserve((terms.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < terms.size(); i += 2) next.push_back(terms[i] + terms[i + 1]);
    if (terms.size() % 2 == 1) next.push_back(terms.back());
    terms.swap(next);
  }
  const ComplexMatrix total = terms.empty() ? ComplexMatrix::Zero(n, n) : terms.front();
  return total.real() / (2.0 * std::numbers::pi);
}

Matrix t_phi(const SymOp& a_plus, const SymOp& a_minus, const Matrix& k, const DOIQuadrature& quad,
             double tail_tol) {
  const Matrix tp = t_psi(a_plus, a_minus, k, quad, tail_tol);
  auto inv_half = [](double x) { return 1.0 / std::sqrt(x * x + 1.0); };
  return tp + apply_fn(a_plus, inv_half) * tp * apply_fn(a_minus, inv_half) -
         apply_fn(a_plus, g_fn) * tp * apply_fn(a_minus, g_fn);
}

DOIResult g_diff_via_doi(const SymOp& a_plus, const SymOp& a_minus, const DOIQuadrature& quad,
                         double tail_tol) {
  DOIResult r;
  r.value = t_phi(a_plus, a_minus, k_operator(a_plus, a_minus), quad, tail_tol);
  const Matrix direct = apply_fn(a_plus, g_fn) - apply_fn(a_minus, g_fn);
  r.residual = trace_norm(Matrix(r.value - direct));
  return r;
}

DOIResult g_diff_via_doi(const SymOp& a_plus, const SymOp& a_minus, double tol) {
  if (!(tol >= 1e-10)) throw PreconditionError("g_diff_via_doi: tolerance must be at least 1e-10");
  return g_diff_via_doi(a_plus, a_minus, doi_quadrature_for(tol));
}

}  // namespace sfl
