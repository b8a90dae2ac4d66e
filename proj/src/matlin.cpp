#include "sfl/matlin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sfl/error.hpp"

namespace sfl {

double SymOp::norm() const { return spectrum_.cwiseAbs().maxCoeff(); }

double SymOp::min_abs_eigenvalue() const { return spectrum_.cwiseAbs().minCoeff(); }

SymOp SymOp::from_decomposition(Vector spectrum, Matrix basis) {
  if (basis.rows() != basis.cols() || basis.rows() != spectrum.size()) {
    throw PreconditionError("SymOp::from_decomposition: shape mismatch");
  }
  SymOp op;
  op.entries_ = basis * spectrum.asDiagonal() * basis.transpose();
  op.entries_ = 0.5 * (op.entries_ + op.entries_.transpose()).eval();
  op.spectrum_ = std::move(spectrum);
  op.basis_ = std::move(basis);
  return op;
}

double max_asymmetry(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

SymOp eig_sym(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw PreconditionError("eig_sym: matrix must be square and nonempty");
  }
  if (!m.allFinite()) throw DomainError("eig_sym: non-finite entries");
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = max_asymmetry(m);
  if (asym > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "eig_sym: matrix not symmetric, max |M - M^T| = " << asym << " (scale " << scale << ")";
    throw AsymmetryError(msg.str(), asym);
  }
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eig_sym: QR iteration did not converge within " << 30 * m.rows() << " sweeps";
    throw ConvergenceError(msg.str());
  }
  SymOp op;
  op.entries_ = sym;
  op.spectrum_ = solver.eigenvalues();
  op.basis_ = solver.eigenvectors();
  return op;
}

Matrix apply_fn(const SymOp& a, const RealFn& f) {
  const Vector& lam = a.spectrum();
  Vector values(lam.size());
  for (Eigen::Index j = 0; j < lam.size(); ++j) {
    values(j) = f(lam(j));
    if (!std::isfinite(values(j))) {
      std::ostringstream msg;
      msg << "apply_fn: function not finite at eigenvalue " << lam(j);
      throw DomainError(msg.str());
    }
  }
  Matrix out = a.basis() * values.asDiagonal() * a.basis().transpose();
  return 0.5 * (out + out.transpose());
}

ComplexMatrix apply_fn_complex(const SymOp& a, const ComplexFn& f) {
  const Vector& lam = a.spectrum();
  Eigen::VectorXcd values(lam.size());
  for (Eigen::Index j = 0; j < lam.size(); ++j) {
    values(j) = f(lam(j));
    if (!std::isfinite(values(j).real()) || !std::isfinite(values(j).imag())) {
      std::ostringstream msg;
      msg << "apply_fn: function not finite at eigenvalue " << lam(j);
      throw DomainError(msg.str());
    }
  }
  const ComplexMatrix v = a.basis().cast<Complex>();
  return v * values.asDiagonal() * v.transpose();
}

Complex log_det(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw PreconditionError("log_det: matrix must be square");
  if (m.size() == 0) return {0.0, 0.0};
  if (!m.allFinite()) throw DomainError("log_det: non-finite entries");
  Eigen::PartialPivLU<ComplexMatrix> lu(m);
  const ComplexMatrix& packed = lu.matrixLU();
  double smallest = std::numeric_limits<double>::infinity();
  double log_mag = 0.0;
  double phase = 0.0;
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    const Complex u = packed(i, i);
    const double mag = std::abs(u);
    smallest = std::min(smallest, mag);
    if (mag == 0.0) break;
    log_mag += std::log(mag);
    phase += std::arg(u);
  }
  if (smallest == 0.0 || lu.rcond() < 1e-14) {
    std::ostringstream msg;
    msg << "log_det: matrix singular to working precision (smallest pivot " << smallest
        << ", rcond " << (smallest == 0.0 ? 0.0 : lu.rcond()) << ")";
    throw SingularMatrixError(msg.str(), smallest);
  }
  if (lu.permutationP().determinant() < 0) phase += std::numbers::pi;
  // Wrap into (-pi, pi].
  phase = std::remainder(phase, 2.0 * std::numbers::pi);
  if (phase <= -std::numbers::pi) phase += 2.0 * std::numbers::pi;
  return {log_mag, phase};
}

int counting(const SymOp& a, double lambda) {
  const Vector& lam = a.spectrum();
  return static_cast<int>(std::upper_bound(lam.data(), lam.data() + lam.size(), lambda) -
                          lam.data());
}

int count_in(const SymOp& a, double lo, double hi) {
  const Vector& lam = a.spectrum();
  const double* first = std::lower_bound(lam.data(), lam.data() + lam.size(), lo);
  const double* last = std::lower_bound(lam.data(), lam.data() + lam.size(), hi);
  return static_cast<int>(std::max<std::ptrdiff_t>(0, last - first));
}

double trace_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(m).singularValues().sum();
}

double trace_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<ComplexMatrix>(m).singularValues().sum();
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

Matrix spectral_projection(const SymOp& a, const std::function<bool(double)>& keep) {
  const Vector& lam = a.spectrum();
  Vector mask(lam.size());
  for (Eigen::Index j = 0; j < lam.size(); ++j) mask(j) = keep(lam(j)) ? 1.0 : 0.0;
  Matrix p = a.basis() * mask.asDiagonal() * a.basis().transpose();
  return 0.5 * (p + p.transpose());
}

}  // namespace sfl
