#include "sfl/scenarios.hpp"

#include <cmath>
#include <numbers>

#include "sfl/error.hpp"

namespace sfl::scenarios {

namespace {

double sech2(double t) {
  const double c = std::cosh(t);
  return std::isinf(c) ? 0.0 : 1.0 / (c * c);
}

}  // namespace

OperatorPath tanh2(double support_hint) {
  const Matrix id = Matrix::Identity(2, 2);
  return OperatorPath(
      eig_sym(-id), [id](double t) -> Matrix { return (1.0 + std::tanh(t)) * id; },
      [id](double t) -> Matrix { return sech2(t) * id; }, Matrix(2.0 * id), support_hint);
}

OperatorPath tanh2_reversed(double support_hint) {
  const Matrix id = Matrix::Identity(2, 2);
  return OperatorPath(
      eig_sym(id), [id](double t) -> Matrix { return -(1.0 + std::tanh(t)) * id; },
      [id](double t) -> Matrix { return -sech2(t) * id; }, Matrix(-2.0 * id), support_hint);
}

OperatorPath tanh_mixed(double support_hint) {
  Matrix sign = Matrix::Zero(2, 2);
  sign(0, 0) = 1.0;
  sign(1, 1) = -1.0;
  return OperatorPath(
      eig_sym(-sign), [sign](double t) -> Matrix { return (1.0 + std::tanh(t)) * sign; },
      [sign](double t) -> Matrix { return sech2(t) * sign; }, Matrix(2.0 * sign), support_hint);
}

OperatorPath rot2(double lo, double hi, double support_hint) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = lo;
  d(1, 1) = hi;
  auto rotated = [d](double theta) -> Matrix {
    Matrix r(2, 2);
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r * d * r.transpose();
  };
  auto theta = [](double t) { return 0.25 * std::numbers::pi * (1.0 + std::tanh(t)); };
  return OperatorPath(
      eig_sym(d), [rotated, theta, d](double t) -> Matrix { return rotated(theta(t)) - d; },
      [d, theta](double t) -> Matrix {
        // d/dt R D R^T = theta' (R' D R^T + R D R'^T) = theta' [J, R D R^T], J = [[0,-1],[1,0]].
        const double th = theta(t);
        Matrix r(2, 2);
        r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        Matrix j(2, 2);
        j << 0.0, -1.0, 1.0, 0.0;
        const Matrix a = r * d * r.transpose();
        return 0.25 * std::numbers::pi * sech2(t) * (j * a - a * j);
      },
      Matrix(rotated(0.5 * std::numbers::pi) - d), support_hint);
}

OperatorPath lattice1d(const LatticeParams& p) {
  const int k = p.sites;
  if (k < 2 || p.power < 1) throw PreconditionError("lattice1d: need sites >= 2 and power >= 1");
  Matrix l = Matrix::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    l(i, i) = -1.0;
    if (i + 1 < k) l(i, i + 1) = 1.0;
  }
  const Matrix lap = l.transpose() * l;
  Matrix kinetic = Matrix::Identity(k, k);
  for (int i = 0; i < p.power; ++i) kinetic = kinetic * lap;
  Matrix a = kinetic;
  Vector w(k);
  for (int i = 0; i < k; ++i) {
    a(i, i) += -p.mu + p.v0 * std::cos(2.0 * std::numbers::pi * i / k) + p.eps;
    const double x = (i - 0.5 * k) / p.sigma;
    w(i) = p.w0 * std::exp(-x * x);
  }
  const Matrix wd = w.asDiagonal();
  return OperatorPath(
      eig_sym(a), [wd](double t) -> Matrix { return 0.5 * (1.0 + std::tanh(t)) * wd; },
      [wd](double t) -> Matrix { return 0.5 * sech2(t) * wd; }, wd, p.support_hint);
}

OperatorPath tanh_polynomial(const Matrix& a_minus, const std::vector<Matrix>& coeffs,
                             double support_hint) {
  const Eigen::Index n = a_minus.rows();
  for (const Matrix& c : coeffs) {
    if (c.rows() != n || c.cols() != n) {
      throw PreconditionError("tanh_polynomial: coefficient shape mismatch");
    }
  }
  Matrix bplus = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const int power = static_cast<int>(k) + 1;
    bplus += coeffs[k] * (1.0 - std::pow(-1.0, power));
  }
  return OperatorPath(
      eig_sym(a_minus),
      [coeffs, n](double t) -> Matrix {
        Matrix b = Matrix::Zero(n, n);
        const double th = std::tanh(t);
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
          const int power = static_cast<int>(k) + 1;
          b += coeffs[k] * (std::pow(th, power) - std::pow(-1.0, power));
        }
        return b;
      },
      [coeffs, n](double t) -> Matrix {
        Matrix b = Matrix::Zero(n, n);
        const double th = std::tanh(t);
        const double s2 = sech2(t);
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
          const int power = static_cast<int>(k) + 1;
          b += coeffs[k] * (power * std::pow(th, power - 1) * s2);
        }
        return b;
      },
      bplus, support_hint);
}

std::vector<std::string> gallery_names() {
  return {"tanh2", "tanh2-reversed", "tanh-mixed", "rot2", "lattice1d", "custom"};
}

Matrix matrix_from_json(const nlohmann::json& rows) {
  if (!rows.is_array() || rows.empty()) throw PreconditionError("matrix: expected array of rows");
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = static_cast<Eigen::Index>(rows[0].size());
  Matrix m(n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n_cols) {
      throw PreconditionError("matrix: ragged rows");
    }
    for (Eigen::Index j = 0; j < n_cols; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

namespace {

OperatorPath inline_scenario(const nlohmann::json& spec, double support_hint) {
  if (!spec.contains("a_minus")) throw PreconditionError("custom scenario: missing a_minus");
  const Matrix a = matrix_from_json(spec.at("a_minus"));
  std::vector<Matrix> coeffs;
  if (spec.contains("tanh_coeffs")) {
    for (const auto& c : spec.at("tanh_coeffs")) coeffs.push_back(matrix_from_json(c));
  }
  return tanh_polynomial(a, coeffs, support_hint);
}

}  // namespace

OperatorPath from_config(const nlohmann::json& config) {
  try {
    const nlohmann::json params = config.value("params", nlohmann::json::object());
    const double hint = config.value("support_hint", params.value("support_hint", 12.0));
    if (!config.contains("scenario")) throw PreconditionError("config: missing \"scenario\"");
    const auto& scenario = config.at("scenario");
    if (scenario.is_object()) return inline_scenario(scenario, scenario.value("support_hint", hint));
    const std::string name = scenario.get<std::string>();
    OperatorPath path = [&]() -> OperatorPath {
      if (name == "tanh2") return tanh2(hint);
      if (name == "tanh2-reversed") return tanh2_reversed(hint);
      if (name == "tanh-mixed") return tanh_mixed(hint);
      if (name == "rot2") return rot2(params.value("lo", -1.0), params.value("hi", 2.0), hint);
      if (name == "lattice1d") {
        LatticeParams lp;
        lp.sites = config.value("dim", params.value("sites", lp.sites));
        lp.power = params.value("power", lp.power);
        lp.mu = params.value("mu", lp.mu);
        lp.v0 = params.value("v0", lp.v0);
        lp.eps = params.value("eps", lp.eps);
        lp.w0 = params.value("w0", lp.w0);
        lp.sigma = params.value("sigma", lp.sigma);
        lp.support_hint = hint;
        return lattice1d(lp);
      }
      if (name == "custom") return inline_scenario(params, hint);
      throw PreconditionError("config: unknown scenario \"" + name + "\"");
    }();
    if (config.contains("dim") && config.at("dim").get<Eigen::Index>() != path.dim()) {
      throw PreconditionError("config: \"dim\" does not match scenario dimension " +
                              std::to_string(path.dim()));
    }
    return path;
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("config: ") + e.what());
  }
}

}  // namespace sfl::scenarios
