#include "sfl/quadrature.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>

#include "sfl/error.hpp"

namespace sfl::quad {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

double integrate_finite(const std::function<double(double)>& f, double a, double b,
                        double rel_tol) {
  if (a == b) return 0.0;
  return GK::integrate(f, a, b, 20, rel_tol);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (std::isnan(a) || std::isnan(b)) throw DomainError("integrate: NaN bound");
  if (a > b) return -integrate(f, b, a, rel_tol);
  const bool inf_a = std::isinf(a);
  const bool inf_b = std::isinf(b);
  if (!inf_a && !inf_b) return integrate_finite(f, a, b, rel_tol);
  if (inf_a && inf_b) {
    boost::math::quadrature::sinh_sinh<double> integrator;
    return integrator.integrate(f, std::sqrt(rel_tol));
  }
  boost::math::quadrature::exp_sinh<double> integrator;
  const double tol = std::sqrt(std::numeric_limits<double>::epsilon());
  if (inf_b) {
    return integrator.integrate([&](double x) { return f(a + x); }, 0.0,
                                std::numeric_limits<double>::infinity(), tol);
  }
  return integrator.integrate([&](double x) { return f(b - x); }, 0.0,
                              std::numeric_limits<double>::infinity(), tol);
}

Complex integrate_complex(const std::function<Complex(double)>& f, double a, double b, double rel_tol) {
  const std::function<double(double)> re_part = [&](double x) { return f(x).real(); };
  const std::function<double(double)> im_part = [&](double x) { return f(x).imag(); };
  const double re = integrate(re_part, a, b, rel_tol);
  const double im = integrate(im_part, a, b, rel_tol);
  return {re, im};
}

namespace {

struct SimpsonState {
  const std::function<Matrix(double)>* f;
  int evaluations = 0;
  double error = 0.0;
};

Matrix simpson_recurse(SimpsonState& st, double a, double b, const Matrix& fa, const Matrix& fm,
                       const Matrix& fb, const Matrix& whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const Matrix flm = (*st.f)(lm);
  const Matrix frm = (*st.f)(rm);
  st.evaluations += 2;
  const Matrix left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const Matrix right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const Matrix delta = left + right - whole;
  const double err = delta.norm() / 15.0;
  if (depth <= 0 || err <= tol) {
    st.error += err;
    return left + right + delta / 15.0;
  }
  return simpson_recurse(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

MatrixIntegral adaptive_simpson(const std::function<Matrix(double)>& f, double a, double b,
                                double abs_tol, int max_depth) {
  SimpsonState st{&f};
  // Start from a few panels so narrow features are not skipped by the first estimate.
  constexpr int kPanels = 16;
  MatrixIntegral out;
  const double width = (b - a) / kPanels;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = a + p * width;
    const double hi = (p + 1 == kPanels) ? b : lo + width;
    const Matrix flo = f(lo);
    const Matrix fhi = f(hi);
    const Matrix fmid = f(0.5 * (lo + hi));
    st.evaluations += 3;
    const Matrix whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    Matrix piece = simpson_recurse(st, lo, hi, flo, fmid, fhi, whole, abs_tol / kPanels, max_depth);
    if (p == 0) {
      out.value = std::move(piece);
    } else {
      out.value += piece;
    }
  }
  out.error_estimate = st.error;
  out.evaluations = st.evaluations;
  return out;
}

Rule gauss_legendre_panels(double a, double b, int panels) {
  using G = boost::math::quadrature::gauss<double, 10>;
  if (panels < 1) throw PreconditionError("gauss_legendre_panels: need at least one panel");
  const auto& abscissa = G::abscissa();
  const auto& weights = G::weights();
  Rule rule;
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * width;
    const double half = 0.5 * width;
    // Boost stores the non-negative half of the symmetric rule; 10 points has no zero node.
    for (std::size_t i = abscissa.size(); i-- > 0;) {
      rule.nodes.push_back(c - half * abscissa[i]);
      rule.weights.push_back(half * weights[i]);
    }
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      rule.nodes.push_back(c + half * abscissa[i]);
      rule.weights.push_back(half * weights[i]);
    }
  }
  return rule;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw PreconditionError("trapezoid: size mismatch");
  double total = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) total += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return total;
}

}  // namespace sfl::quad
