#include "sfl/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sfl/error.hpp"
#include "sfl/quadrature.hpp"

namespace sfl {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr double kEulerGamma = 0.57721566490153286061;

}  // namespace

double lanczos_gamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) {
    std::ostringstream msg;
    msg << "lanczos_gamma: pole at " << x;
    throw DomainError(msg.str());
  }
  const double pi = std::numbers::pi;
  if (x < 0.5) return pi / (std::sin(pi * x) * lanczos_gamma(1.0 - x));
  const double y = x - 1.0;
  double a = kLanczos[0];
  const double t = y + kLanczosG + 0.5;
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (y + static_cast<double>(i));
  return std::sqrt(2.0 * pi) * std::pow(t, y + 0.5) * std::exp(-t) * a;
}

double bessel_k0(double x) {
  if (!(x > 0.0)) {
    std::ostringstream msg;
    msg << "bessel_k0: argument " << x << " must be positive";
    throw DomainError(msg.str());
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (x <= 2.0) {
    // K_0 = -(ln(x/2) + gamma) I_0(x) + sum_k (x^2/4)^k / (k!)^2 H_k
    const double q = 0.25 * x * x;
    double term = 1.0;
    double harmonic = 0.0;
    double i0 = 1.0;
    double tail = 0.0;
    for (int k = 1; k < 60; ++k) {
      term *= q / (static_cast<double>(k) * k);
      harmonic += 1.0 / k;
      i0 += term;
      tail += term * harmonic;
      if (term < eps * i0) break;
    }
    return -(std::log(0.5 * x) + kEulerGamma) * i0 + tail;
  }
  // Steed's continued fraction for K_nu at nu = 0.
  const double a1 = 0.25;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i < 10000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < eps) {
      return std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
    }
  }
  throw ConvergenceError("bessel_k0: continued fraction did not converge");
}

double whittaker_w(double kappa, double mu, double z) {
  if (!(z > 0.0)) {
    std::ostringstream msg;
    msg << "whittaker_w: argument " << z << " must be positive";
    throw DomainError(msg.str());
  }
  // W = e^{-z/2} z^{mu+1/2} / Gamma(mu-kappa+1/2) * int_0^inf e^{-zt} t^{mu-kappa-1/2} (1+t)^{mu+kappa-1/2} dt;
  // both supported pairs have t^{-1/2}, which t = u^2 turns into 2 du.
  double power;
  double prefactor;
  if (kappa == -0.5 && mu == -0.5) {
    power = -1.5;
    prefactor = 1.0;
  } else if (kappa == 0.0 && mu == 0.0) {
    power = -0.5;
    prefactor = std::sqrt(z);
  } else {
    throw DomainError("whittaker_w: only (kappa, mu) = (-1/2, -1/2) and (0, 0) are supported");
  }
  const double gauss_scale = 1.0 / std::sqrt(z);
  auto integrand = [z, power](double u) {
    return 2.0 * std::exp(-z * u * u) * std::pow(1.0 + u * u, power);
  };
  // Most of the mass sits in [0, a few / sqrt(z)].
  const double split = 6.0 * gauss_scale;
  const double body = quad::integrate(integrand, 0.0, split, 1e-14);
  const double tail = quad::integrate(integrand, split, std::numeric_limits<double>::infinity(), 1e-14);
  return std::exp(-0.5 * z) * prefactor / std::sqrt(std::numbers::pi) * (body + tail);
}

double whittaker_w_half(double z) { return whittaker_w(-0.5, -0.5, z); }

}  // namespace sfl
