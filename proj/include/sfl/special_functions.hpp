#pragma once

namespace sfl {

/// Gamma function by the Lanczos approximation (g = 7, 9 terms) with
/// reflection below 1/2. Throws DomainError at non-positive integers.
double lanczos_gamma(double x);

/// Modified Bessel function K_0 for x > 0: power series for x <= 2, Steed's
/// continued fraction above. Throws DomainError for x <= 0.
double bessel_k0(double x);

/// Whittaker W_{kappa,mu}(z) for z > 0 from its Laplace-type integral after
/// the substitution t = u^2. Only (kappa, mu) = (-1/2, -1/2) and (0, 0) are
/// supported; other pairs and z <= 0 throw DomainError.
double whittaker_w(double kappa, double mu, double z);

/// W_{-1/2,-1/2}(z).
double whittaker_w_half(double z);

}  // namespace sfl
