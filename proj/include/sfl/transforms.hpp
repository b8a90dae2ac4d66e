#pragma once

#include <utility>
#include <vector>

#include "sfl/step_function.hpp"

namespace sfl {

/// (1/pi) int_{-sqrt(l)}^{sqrt(l)} xi(nu) (l - nu^2)^{-1/2} dnu, exact on each
/// step piece via arcsin. Throws PreconditionError for lambda <= 0.
double abel_forward(const StepFunction& xi, double lambda);

/// Same transform for sampled data (nu, value), linearly interpolated and
/// integrated by `nodes`-point Gauss-Chebyshev quadrature. Throws DomainError
/// when the samples do not cover [-sqrt(l), sqrt(l)].
double abel_forward_quad(std::vector<std::pair<double, double>> samples, double lambda,
                         int nodes = 256);

/// -(m/pi) int xi(nu) (nu^2 + m^2)^{-1} dnu, exact via arctan.
double eta_closed(const StepFunction& xi, double m);

/// -m (s+1)/(2 sqrt(pi)) Gamma((s+2)/2)/Gamma((s+3)/2) int xi(nu) (nu^2+m^2)^{-(s+2)/2} dnu
/// for s > -1/2.
double eta_zeta(const StepFunction& xi, double m, double s);

/// The same quantity from xi_H = abel_forward(xi):
/// -m ((s+1)/2) int_0^inf xi_H(l) (l + m^2)^{-(s+3)/2} dl.
double eta_zeta_via_abel(const StepFunction& xi, double m, double s);

/// Heat-regularized asymmetry for t > 0:
/// -(m/(2 sqrt(pi))) int xi(nu) q^{-1} W_{-1/2,-1/2}(t q) e^{-t q/2} dnu
/// - (m/pi) t int xi(nu) K_0(t q/2) e^{-t q/2} dnu, with q = nu^2 + m^2.
double eta_heat(const StepFunction& xi, double m, double t);

/// The same quantity from xi_H = abel_forward(xi):
/// m int_0^inf xi_H(l) d/dl[(l + m^2)^{-1/2} e^{-t(l + m^2)}] dl.
double eta_heat_via_abel(const StepFunction& xi, double m, double t);

}  // namespace sfl
