#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "sfl/oppath.hpp"

namespace sfl::scenarios {

/// A(t) = tanh(t) I_2: A_- = -I_2, B(t) = (1 + tanh t) I_2.
OperatorPath tanh2(double support_hint = 12.0);

/// A(t) = -tanh(t) I_2 (the reversed tanh2 path).
OperatorPath tanh2_reversed(double support_hint = 12.0);

/// A(t) = diag(tanh t, -tanh t).
OperatorPath tanh_mixed(double support_hint = 12.0);

/// A(t) = R(theta) diag(lo, hi) R(theta)^T with theta(t) = (pi/4)(1 + tanh t):
/// the eigenvectors rotate by pi/2 while the spectrum stays fixed.
OperatorPath rot2(double lo = -1.0, double hi = 2.0, double support_hint = 12.0);

struct LatticeParams {
  int sites = 32;
  int power = 1;
  double mu = 2.0;
  double v0 = 0.3;
  double eps = 0.05;
  double w0 = 1.5;
  double sigma = 4.0;
  double support_hint = 12.0;
};

/// Chain of `sites` sites with A_- = (L^T L)^p + V_- + eps I, where L is the
/// forward difference and V_-(i) = -mu + v0 cos(2 pi i / k), perturbed by
/// B(t) = (1 + tanh t)/2 diag(w0 exp(-((i - k/2)/sigma)^2)).
OperatorPath lattice1d(const LatticeParams& params = {});

/// A_- plus B(t) = sum_k C_k (tanh(t)^k - (-1)^k), k = 1..K; B(-inf) = 0.
OperatorPath tanh_polynomial(const Matrix& a_minus, const std::vector<Matrix>& coeffs,
                             double support_hint = 12.0);

/// Names accepted by from_config().
std::vector<std::string> gallery_names();

/// Builds a path from a scenario config document:
///   { "scenario": name | {inline}, "params": {...}, "dim": n, "support_hint": T }
/// Inline scenarios (or name "custom") read "a_minus" (matrix) and
/// "tanh_coeffs" (list of matrices) from the object or from "params".
/// Throws PreconditionError on malformed documents.
OperatorPath from_config(const nlohmann::json& config);

/// Matrix from a JSON array of rows.
Matrix matrix_from_json(const nlohmann::json& rows);

}  // namespace sfl::scenarios
