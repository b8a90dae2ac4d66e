#include "sfl/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sfl/error.hpp"
#include "sfl/quadrature.hpp"
#include "sfl/special_functions.hpp"

namespace sfl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonzero_mass(double m, const char* who) {
  if (m == 0.0 || !std::isfinite(m)) throw PreconditionError(std::string(who) + ": m must be nonzero");
}

// Sum of value * int_lo^hi f over the support pieces, each piece split at 0
// so that even kernels see smooth integrands.
double integrate_pieces(const StepFunction& xi, const std::function<double(double)>& f, double rel_tol) {
  double total = 0.0;
  for (const auto& p : xi.support_pieces()) {
    if (p.lo < 0.0 && p.hi > 0.0) {
      total += p.value * (quad::integrate(f, p.lo, 0.0, rel_tol) + quad::integrate(f, 0.0, p.hi, rel_tol));
    } else {
      total += p.value * quad::integrate(f, p.lo, p.hi, rel_tol);
    }
  }
  return total;
}

// int_0^inf abel_forward(xi, l) k(l) dl, split where xi_H has kinks.
double integrate_abel(const StepFunction& xi, const std::function<double(double)>& kernel, double rel_tol) {
  std::vector<double> cuts{0.0};
  for (double b : xi.breakpoints()) cuts.push_back(b * b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const double at_zero = xi(0.0);
  auto f = [&](double l) { return (l > 0.0 ? abel_forward(xi, l) : at_zero) * kernel(l); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) total += quad::integrate(f, cuts[i], cuts[i + 1], rel_tol);
  }
  total += quad::integrate(f, cuts.back(), kInf, rel_tol);
  return total;
}

}  // namespace

double abel_forward(const StepFunction& xi, double lambda) {
  if (!(lambda > 0.0)) {
    std::ostringstream msg;
    msg << "abel_forward: lambda " << lambda << " must be positive";
    throw PreconditionError(msg.str());
  }
  const double r = std::sqrt(lambda);
  auto clip = [r](double x) { return std::clamp(x, -r, r); };
  double total = 0.0;
  for (const auto& p : xi.support_pieces()) {
    total += p.value * (std::asin(clip(p.hi) / r) - std::asin(clip(p.lo) / r));
  }
  return total / std::numbers::pi;
}

double abel_forward_quad(std::vector<std::pair<double, double>> samples, double lambda, int nodes) {
  if (!(lambda > 0.0)) throw PreconditionError("abel_forward_quad: lambda must be positive");
  if (nodes < 1) throw PreconditionError("abel_forward_quad: need at least one node");
  std::sort(samples.begin(), samples.end());
  const double r = std::sqrt(lambda);
  if (samples.size() < 2 || samples.front().first > -r || samples.back().first < r) {
    std::ostringstream msg;
    msg << "abel_forward_quad: samples do not cover [" << -r << ", " << r << "]";
    throw DomainError(msg.str());
  }
  auto interp = [&samples](double x) {
    auto it = std::upper_bound(samples.begin(), samples.end(), x,
                               [](double v, const std::pair<double, double>& s) { return v < s.first; });
    if (it == samples.end()) return samples.back().second;
    if (it == samples.begin()) return samples.front().second;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    if (hi.first == lo.first) return hi.second;
    const double w = (x - lo.first) / (hi.first - lo.first);
    return (1.0 - w) * lo.second + w * hi.second;
  };
  // (1/pi) int_{-r}^{r} f(nu) / sqrt(r^2 - nu^2) dnu = mean of f at the Chebyshev nodes.
  std::vector<double> terms(static_cast<std::size_t>(nodes));
  for (int k = 0; k < nodes; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + 1.0) / (2.0 * nodes);
    terms[static_cast<std::size_t>(k)] = interp(r * std::cos(theta));
  }
  return quad::pairwise_sum<double>(terms) / nodes;
}

double eta_closed(const StepFunction& xi, double m) {
  require_nonzero_mass(m, "eta_closed");
  double total = 0.0;
  for (const auto& p : xi.support_pieces()) {
    total += p.value * (std::atan(p.hi / m) - std::atan(p.lo / m));
  }
  return -total / std::numbers::pi;
}

double eta_zeta(const StepFunction& xi, double m, double s) {
  require_nonzero_mass(m, "eta_zeta");
  if (!(s > -0.5)) throw PreconditionError("eta_zeta: s must exceed -1/2");
  const double m2 = m * m;
  const double expo = -0.5 * (s + 2.0);
  const double integral = integrate_pieces(
      xi, [m2, expo](double nu) { return std::pow(nu * nu + m2, expo); }, 1e-13);
  const double pref = -m * (s + 1.0) / (2.0 * std::sqrt(std::numbers::pi)) *
                      lanczos_gamma(0.5 * (s + 2.0)) / lanczos_gamma(0.5 * (s + 3.0));
  return pref * integral;
}

double eta_zeta_via_abel(const StepFunction& xi, double m, double s) {
  require_nonzero_mass(m, "eta_zeta_via_abel");
  if (!(s > -0.5)) throw PreconditionError("eta_zeta_via_abel: s must exceed -1/2");
  const double m2 = m * m;
  const double expo = -0.5 * (s + 3.0);
  const double integral = integrate_abel(xi, [m2, expo](double l) { return std::pow(l + m2, expo); }, 1e-12);
  return -m * 0.5 * (s + 1.0) * integral;
}

double eta_heat(const StepFunction& xi, double m, double t) {
  require_nonzero_mass(m, "eta_heat");
  if (!(t > 0.0)) throw PreconditionError("eta_heat: t must be positive");
  const double m2 = m * m;
  auto whittaker_part = [m2, t](double nu) {
    const double q = nu * nu + m2;
    const double z = t * q;
    const double damp = std::exp(-0.5 * z);
    if (damp == 0.0) return 0.0;
    return whittaker_w_half(z) * damp / q;
  };
  auto bessel_part = [m2, t](double nu) {
    const double z = t * (nu * nu + m2);
    const double damp = std::exp(-0.5 * z);
    if (damp == 0.0) return 0.0;
    return bessel_k0(0.5 * z) * damp;
  };
  const double first = integrate_pieces(xi, whittaker_part, 1e-10);
  const double second = integrate_pieces(xi, bessel_part, 1e-10);
  return -m / (2.0 * std::sqrt(std::numbers::pi)) * first - m / std::numbers::pi * t * second;
}

double eta_heat_via_abel(const StepFunction& xi, double m, double t) {
  require_nonzero_mass(m, "eta_heat_via_abel");
  if (!(t > 0.0)) throw PreconditionError("eta_heat_via_abel: t must be positive");
  const double m2 = m * m;
  auto kernel = [m2, t](double l) {
    const double q = l + m2;
    return std::exp(-t * q) * (-0.5 * std::pow(q, -1.5) - t / std::sqrt(q));
  };
  return m * integrate_abel(xi, kernel, 1e-12);
}

}  // namespace sfl
