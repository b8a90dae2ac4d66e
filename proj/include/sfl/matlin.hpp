#pragma once

#include <complex>
#include <functional>
#include <Eigen/Dense>

namespace sfl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Real symmetric matrix together with its orthonormal spectral decomposition.
///
/// Instances are produced by eig_sym() (or from an explicitly supplied
/// decomposition) and are immutable afterwards. Eigenvalues are ascending and
/// the columns of basis() are the matching orthonormal eigenvectors, so
/// entries() == basis() * spectrum().asDiagonal() * basis().transpose().
class SymOp {
 public:
  SymOp() = default;

  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }
  const Vector& spectrum() const { return spectrum_; }
  const Matrix& basis() const { return basis_; }

  double min_eigenvalue() const { return spectrum_(0); }
  double max_eigenvalue() const { return spectrum_(spectrum_.size() - 1); }
  /// max |lambda_j|, the operator norm.
  double norm() const;
  /// min |lambda_j|, distance of the spectrum from zero.
  double min_abs_eigenvalue() const;

  /// Builds a SymOp from a known decomposition. `spectrum` must be ascending
  /// and `basis` orthonormal; only the shapes are checked.
  static SymOp from_decomposition(Vector spectrum, Matrix basis);

 private:
  friend SymOp eig_sym(const Matrix& m);
  Matrix entries_;
  Vector spectrum_;
  Matrix basis_;
};

/// Spectral decomposition of a real symmetric matrix.
///
/// Rejects input whose max |M - M^T| exceeds 1e-12 * max|M| (AsymmetryError)
/// and reports eigensolver non-convergence as ConvergenceError.
SymOp eig_sym(const Matrix& m);

using RealFn = std::function<double(double)>;
using ComplexFn = std::function<Complex(double)>;

/// V f(Lambda) V^T. Throws DomainError naming the eigenvalue where f is not finite.
Matrix apply_fn(const SymOp& a, const RealFn& f);
ComplexMatrix apply_fn_complex(const SymOp& a, const ComplexFn& f);

/// Principal logarithm of det(M): real part log|det M|, imaginary part in (-pi, pi].
/// Throws SingularMatrixError (carrying the smallest pivot magnitude) when the
/// LU reciprocal condition estimate drops below 1e-14.
Complex log_det(const ComplexMatrix& m);

/// #{ j : lambda_j <= lambda }.
int counting(const SymOp& a, double lambda);

/// Number of eigenvalues in the half-open interval [lo, hi).
int count_in(const SymOp& a, double lo, double hi);

/// Sum of singular values.
double trace_norm(const Matrix& m);
double trace_norm(const ComplexMatrix& m);
/// Largest singular value.
double operator_norm(const Matrix& m);

/// max |M_ij - M_ji|.
double max_asymmetry(const Matrix& m);

/// Orthogonal projection onto the span of eigenvectors whose eigenvalue
/// satisfies `keep`.
Matrix spectral_projection(const SymOp& a, const std::function<bool(double)>& keep);

}  // namespace sfl
