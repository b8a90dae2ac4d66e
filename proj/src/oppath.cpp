#include "sfl/oppath.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "sfl/error.hpp"
#include "sfl/quadrature.hpp"

namespace sfl {

namespace {

constexpr double kPathSymTol = 1e-10;
constexpr double kAsymptoteTol = 1e-10;

Matrix checked(const Matrix& m, Eigen::Index n, const char* what, double t) {
  if (m.rows() != n || m.cols() != n) {
    std::ostringstream msg;
    msg << what << "(" << t << ") has shape " << m.rows() << "x" << m.cols() << ", expected " << n
        << "x" << n;
    throw PreconditionError(msg.str());
  }
  const double asym = max_asymmetry(m);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (asym > kPathSymTol * scale) {
    std::ostringstream msg;
    msg << what << "(" << t << ") not symmetric: max asymmetry " << asym;
    throw AsymmetryError(msg.str(), asym);
  }
  return 0.5 * (m + m.transpose());
}

}  // namespace

OperatorPath::OperatorPath(SymOp a_minus, MatrixFn b_at, MatrixFn bprime_at,
                           std::optional<Matrix> b_plus, double support_hint)
    : a_minus_(std::move(a_minus)),
      b_at_(std::move(b_at)),
      bprime_at_(std::move(bprime_at)),
      b_plus_(std::move(b_plus)),
      support_hint_(support_hint) {
  if (!b_at_) throw PreconditionError("OperatorPath: B evaluator required");
  if (!(support_hint_ > 0.0)) throw PreconditionError("OperatorPath: support_hint must be positive");
  if (b_plus_ && (b_plus_->rows() != dim() || b_plus_->cols() != dim())) {
    throw PreconditionError("OperatorPath: b_plus has wrong shape");
  }
}

OperatorPath OperatorPath::constant(SymOp a_minus, double support_hint) {
  const Eigen::Index n = a_minus.dim();
  auto zero = [n](double) -> Matrix { return Matrix::Zero(n, n); };
  return OperatorPath(std::move(a_minus), zero, zero, Matrix::Zero(n, n), support_hint);
}

Matrix OperatorPath::b(double t) const { return checked(b_at_(t), dim(), "B", t); }

Matrix OperatorPath::bprime(double t) const {
  if (!bprime_at_) throw PreconditionError("OperatorPath: no B' evaluator supplied");
  return checked(bprime_at_(t), dim(), "B'", t);
}

SymOp a_of(const OperatorPath& path, double t) {
  if (!std::isfinite(t)) throw PreconditionError("a_of: t must be finite");
  return eig_sym(path.a_minus().entries() + path.b(t));
}

BprimeIntegral integrate_bprime(const OperatorPath& path, double lo, double hi) {
  const auto integral = quad::adaptive_simpson([&](double s) { return path.bprime(s); }, lo, hi,
                                               kAsymptoteTol);
  BprimeIntegral out;
  out.value = 0.5 * (integral.value + integral.value.transpose());
  out.quadrature_error = integral.error_estimate;
  return out;
}

namespace {

double tail_estimate(const OperatorPath& path) {
  // Beyond T the derivative is assumed to decay at least exponentially; the
  // sampled norms at T and 2T bound the remaining mass of that tail.
  const double t = path.support_hint();
  double bound = 0.0;
  for (double sign : {-1.0, 1.0}) {
    const double near = path.bprime(sign * t).norm();
    const double far = path.bprime(sign * 2.0 * t).norm();
    if (near == 0.0) {
      bound += far * t;
      continue;
    }
    const double ratio = far / near;
    if (ratio >= 1.0) {
      bound += std::numeric_limits<double>::infinity();
      continue;
    }
    // Exponential fit near * exp(-rate (s - T)) with rate = -log(ratio)/T.
    const double rate = -std::log(std::max(ratio, 1e-300)) / t;
    bound += near / rate;
  }
  return bound;
}

}  // namespace

SymOp asymptote_plus(const OperatorPath& path) {
  if (path.b_plus()) return eig_sym(path.a_minus().entries() + *path.b_plus());
  const double t = path.support_hint();
  BprimeIntegral integral = integrate_bprime(path, -t, t);
  integral.tail_bound = tail_estimate(path);
  if (!(integral.tail_bound <= 1e-6 * (1.0 + integral.value.norm()))) {
    std::ostringstream msg;
    msg << "asymptote_plus: B' tail beyond |t| = " << t << " not negligible (estimated magnitude "
        << integral.tail_bound << ")";
    throw ConvergenceError(msg.str());
  }
  return eig_sym(path.a_minus().entries() + integral.value);
}

Matrix truncation_projection(const SymOp& a_minus, double level) {
  return spectral_projection(a_minus, [level](double x) { return std::abs(x) < level; });
}

OperatorPath truncate(const OperatorPath& path, double level) {
  // A window holding the whole spectrum projects onto everything.
  if (count_in(path.a_minus(), -level, level) == path.dim() &&
      std::abs(path.a_minus().min_eigenvalue()) < level) {
    return path;
  }
  const Matrix p = truncation_projection(path.a_minus(), level);
  const Matrix a = p * path.a_minus().entries() * p;
  SymOp a_minus = eig_sym(0.5 * (a + a.transpose()));
  auto conj = [p](const Matrix& m) -> Matrix {
    Matrix out = p * m * p;
    return 0.5 * (out + out.transpose());
  };
  MatrixFn b = [path, conj](double t) { return conj(path.b_evaluator()(t)); };
  MatrixFn bp;
  if (path.has_bprime()) bp = [path, conj](double t) { return conj(path.bprime_evaluator()(t)); };
  std::optional<Matrix> bplus;
  if (path.b_plus()) bplus = conj(*path.b_plus());
  return OperatorPath(std::move(a_minus), std::move(b), std::move(bp), std::move(bplus),
                      path.support_hint());
}

HypothesisReport hypothesis_report(const OperatorPath& path, std::span<const double> sample_grid) {
  if (sample_grid.empty()) throw PreconditionError("hypothesis_report: empty sample grid");
  HypothesisReport rep;
  const Matrix weight =
      apply_fn(path.a_minus(), [](double x) { return 1.0 / (std::abs(x) + 1.0); });
  std::vector<double> grid(sample_grid.begin(), sample_grid.end());
  std::sort(grid.begin(), grid.end());
  std::vector<double> trace_norms;
  trace_norms.reserve(grid.size());

  const double t_lo = std::min(grid.front(), -path.support_hint());
  for (double t : grid) {
    const Matrix b = path.b_evaluator()(t);
    rep.sym_defect_b = std::max(rep.sym_defect_b, max_asymmetry(b));
    if (path.has_bprime()) {
      const Matrix bp = path.bprime_evaluator()(t);
      rep.sym_defect_bprime = std::max(rep.sym_defect_bprime, max_asymmetry(bp));
      trace_norms.push_back(trace_norm(Matrix(bp * weight)));
      const auto integral = quad::adaptive_simpson(
          [&](double s) -> Matrix { return path.bprime_evaluator()(s); }, t_lo, t, kAsymptoteTol);
      rep.consistency_defect = std::max(rep.consistency_defect, (b - integral.value).norm());
    } else {
      trace_norms.push_back(0.0);
    }
  }
  rep.trace_integral = quad::trapezoid(grid, trace_norms);

  if (path.has_bprime()) {
    const double t = path.support_hint();
    const auto integral = quad::adaptive_simpson(
        [&](double s) -> Matrix { return path.bprime_evaluator()(s); }, -t, t, kAsymptoteTol);
    const Matrix bplus = path.b_plus() ? *path.b_plus() : path.b_evaluator()(t);
    rep.asymptote_gap = (bplus - integral.value).norm();
  }
  return rep;
}

OperatorPath reparameterize(const OperatorPath& path, std::function<double(double)> r,
                            std::function<double(double)> rprime, double support_hint) {
  MatrixFn b = [path, r](double t) { return path.b_evaluator()(r(t)); };
  MatrixFn bp;
  if (path.has_bprime()) {
    bp = [path, r, rprime](double t) -> Matrix { return path.bprime_evaluator()(r(t)) * rprime(t); };
  }
  return OperatorPath(path.a_minus(), std::move(b), std::move(bp), path.b_plus(), support_hint);
}

}  // namespace sfl
