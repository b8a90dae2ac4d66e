#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfl/matlin.hpp"
#include "sfl/oppath.hpp"
#include "sfl/ssf.hpp"
#include "sfl/step_function.hpp"

namespace sfl {

/// Uniform nodes t_k = -T + k h, h = 2T/(N-1), k = 0..N-1.
class TimeGrid {
 public:
  /// Throws PreconditionError unless T > 0 and N >= 8.
  TimeGrid(double half_width, int nodes);
  double half_width() const { return half_width_; }
  int nodes() const { return nodes_; }
  double spacing() const { return 2.0 * half_width_ / (nodes_ - 1); }
  double node(int k) const { return -half_width_ + k * spacing(); }

 private:
  double half_width_;
  int nodes_;
};

enum class Scheme { upwind, spectral };
enum class Boundary { dirichlet, periodic };

/// Largest N n accepted by build_dirac().
inline constexpr Eigen::Index kMaxDiracSize = 6000;

/// Discretized D_A = d/dt + A(t) on a time grid, with the Laplace-type pair
/// H_1 ~ D_A^* D_A and H_2 ~ D_A D_A^*.
///
/// d_matrix() is D_t (x) I_n + blockdiag(A(t_k)), D_t being the backward
/// difference (f_k - f_{k-1})/h with f_{-1} = 0 (upwind, Dirichlet), its
/// periodic wrap, or the Fourier differentiation matrix (spectral, periodic).
///
/// H_1 and H_2 are assembled from -d^2/dt^2 + A(t)^2 -+ A'(t) with the central
/// second difference and the same boundary condition for both. The exact
/// products D^T D and D D^T of a single matrix are isospectral up to
/// cols - rows zero modes, so they cannot carry a nonzero index or the
/// resolvent trace of the continuum pair; see product_spectra_defect() for
/// that exact relation.
class DiracDiscretization {
 public:
  const TimeGrid& grid() const { return grid_; }
  Eigen::Index fiber_dim() const { return n_; }
  Scheme scheme() const { return scheme_; }
  Boundary boundary() const { return boundary_; }
  const Matrix& d_matrix() const { return d_; }
  const Matrix& h1() const { return h1_; }
  const Matrix& h2() const { return h2_; }
  /// Ascending eigenvalues of h1() and h2(), computed once at build time.
  const Vector& h1_spectrum() const { return h1_spec_; }
  const Vector& h2_spectrum() const { return h2_spec_; }
  /// True when B vanished at every node (constant path).
  bool constant_path() const { return constant_; }
  const SymOp& a_minus() const { return a_minus_; }
  const SymOp& a_plus() const { return a_plus_; }

 private:
  friend DiracDiscretization build_dirac(const OperatorPath&, const TimeGrid&, Scheme, Boundary);
  DiracDiscretization(TimeGrid grid) : grid_(grid) {}

  TimeGrid grid_;
  Eigen::Index n_ = 0;
  Scheme scheme_ = Scheme::upwind;
  Boundary boundary_ = Boundary::dirichlet;
  Matrix d_;
  Matrix h1_;
  Matrix h2_;
  Vector h1_spec_;
  Vector h2_spec_;
  bool constant_ = false;
  SymOp a_minus_;
  SymOp a_plus_;
};

/// Throws PreconditionError for N n > kMaxDiracSize (with the size) or for the
/// spectral scheme with Dirichlet boundary. Writes a warning to stderr when
/// T < support_hint.
DiracDiscretization build_dirac(const OperatorPath& path, const TimeGrid& grid,
                                Scheme scheme = Scheme::upwind,
                                Boundary boundary = Boundary::dirichlet);

/// First-order difference matrix D_t (N x N) for the given scheme and boundary.
Matrix time_derivative_matrix(const TimeGrid& grid, Scheme scheme, Boundary boundary);

struct IndexResult {
  int index = 0;
  int kernel_h1 = 0;
  int kernel_h2 = 0;
  /// tau^2 = tol_factor * median(positive eigenvalues of H_1 and H_2).
  double threshold = 0.0;
  /// Smallest |eigenvalue| above threshold divided by the largest one below
  /// (infinite when there are no kernel modes).
  double gap_ratio = 0.0;
};

/// dim ker H_1 - dim ker H_2 from near-zero eigenvalue counts. Throws
/// ConvergenceError ("index not resolved at this resolution") when the gap
/// ratio is below 100.
IndexResult numeric_index(const DiracDiscretization& dd, double tol_factor = 1e-6);

/// tr((H_2 - z)^{-1} - (H_1 - z)^{-1}) from the cached spectra.
Complex resolvent_trace_diff(const DiracDiscretization& dd, Complex z);

/// LHS = resolvent_trace_diff, RHS = (1/2z) tr(g_z(A_+) - g_z(A_-)).
TraceCheck trace_formula_residual(const DiracDiscretization& dd, Complex z);
TraceCheck trace_formula_residual(const OperatorPath& path, const TimeGrid& grid, Complex z);

/// xi_H(lambda) = #{eig(H_1) <= lambda} - #{eig(H_2) <= lambda} for lambda >= 0
/// and 0 for lambda < 0.
StepFunction xi_h_counting(const DiracDiscretization& dd);

/// Median of xi_h_counting over a uniform grid of 201 points in [lo, hi].
double xi_h_median(const DiracDiscretization& dd, double lo, double hi);

/// Largest relative mismatch between the sorted positive eigenvalues of
/// D^T D and D D^T for d_matrix(). Eigenvalues below 1e-7 of the largest are
/// treated as unresolved zeros and skipped.
double product_spectra_defect(const DiracDiscretization& dd);

/// Max entry of |G - h R_0| over node pairs outside a boundary collar, where
/// G = (H_0 - z)^{-1} for the central-difference H_0 = -d^2/dt^2 + A_-^2
/// (Dirichlet) and R_0(s,t) = (1/2) kappa^{-1} exp(-kappa |t - s|),
/// kappa = (A_-^2 - z)^{1/2}. A negative collar selects 8 / min Re(kappa).
double r0_kernel_residual(const SymOp& a_minus, const TimeGrid& grid, Complex z,
                          double collar = -1.0);

/// Max over the eigenvalues of a constant-coefficient periodic d_matrix of
/// dist(Re(eigenvalue), spec(A_-)), using the circulant block diagonalization.
/// Throws PreconditionError for non-periodic boundaries or non-constant paths.
double spectrum_line_check(const DiracDiscretization& dd);
double spectrum_line_check(const SymOp& a_minus, const TimeGrid& grid,
                           Scheme scheme = Scheme::spectral);

/// Eigenvalues of the circulant-block d_matrix: for each Fourier mode the
/// eigenvalues of symbol_m I + A_-.
std::vector<Complex> periodic_spectrum(const DiracDiscretization& dd);

/// Dense dump: "DIRM", u32 rows, u32 cols, u32 reserved (0), then row-major
/// little-endian float64 entries.
void write_dirm(const std::string& path, const Matrix& m);
Matrix read_dirm(const std::string& path);

}  // namespace sfl
