#include "sfl/dirac.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "sfl/error.hpp"
#include "sfl/parallel.hpp"
#include "sfl/quadrature.hpp"

namespace sfl {

TimeGrid::TimeGrid(double half_width, int nodes) : half_width_(half_width), nodes_(nodes) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw PreconditionError("TimeGrid: half width must be positive and finite");
  }
  if (nodes < 8) throw PreconditionError("TimeGrid: at least 8 nodes are required");
}

Matrix time_derivative_matrix(const TimeGrid& grid, Scheme scheme, Boundary boundary) {
  const int n = grid.nodes();
  const double h = grid.spacing();
  Matrix d = Matrix::Zero(n, n);
  if (scheme == Scheme::upwind) {
    for (int k = 0; k < n; ++k) {
      d(k, k) = 1.0 / h;
      if (k > 0) d(k, k - 1) = -1.0 / h;
    }
    if (boundary == Boundary::periodic) d(0, n - 1) = -1.0 / h;
    return d;
  }
  if (boundary != Boundary::periodic) {
    throw PreconditionError("spectral differentiation requires periodic boundary");
  }
  // Fourier differentiation on the period L = N h.
  const double pi = std::numbers::pi;
  const double scale = pi / (n * h);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      const int m = j - k;
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      const double arg = pi * m / n;
      d(j, k) = scale * sign * ((n % 2 == 0) ? std::cos(arg) / std::sin(arg) : 1.0 / std::sin(arg));
    }
  }
  return d;
}

namespace {

Matrix second_difference(const TimeGrid& grid, Boundary boundary) {
  const int n = grid.nodes();
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  Matrix l = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    l(k, k) = 2.0 * inv_h2;
    if (k > 0) l(k, k - 1) = -inv_h2;
    if (k + 1 < n) l(k, k + 1) = -inv_h2;
  }
  if (boundary == Boundary::periodic) {
    l(0, n - 1) -= inv_h2;
    l(n - 1, 0) -= inv_h2;
  }
  return l;
}

Matrix kron_identity(const Matrix& m, Eigen::Index n) {
  Matrix out = Matrix::Zero(m.rows() * n, m.cols() * n);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) out.block(i * n, j * n, n, n).diagonal().setConstant(m(i, j));
    }
  }
  return out;
}

Vector eigenvalues_only(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("eigensolver did not converge on the discretized operator");
  }
  return solver.eigenvalues();
}

Matrix bprime_at(const OperatorPath& path, double t) {
  if (path.has_bprime()) return path.bprime(t);
  const double step = 1e-5 * std::max(1.0, std::abs(t));
  return (path.b(t + step) - path.b(t - step)) / (2.0 * step);
}

}  // namespace

DiracDiscretization build_dirac(const OperatorPath& path, const TimeGrid& grid, Scheme scheme,
                                Boundary boundary) {
  const Eigen::Index n = path.dim();
  const int nodes = grid.nodes();
  const Eigen::Index size = n * nodes;
  if (size > kMaxDiracSize) {
    std::ostringstream msg;
    msg << "build_dirac: discretized size " << size << " exceeds the limit " << kMaxDiracSize;
    throw PreconditionError(msg.str());
  }
  if (scheme == Scheme::spectral && boundary == Boundary::dirichlet) {
    throw PreconditionError("build_dirac: spectral scheme requires periodic boundary");
  }
  if (grid.half_width() < path.support_hint()) {
    std::cerr << "warning: time window " << grid.half_width() << " is shorter than the path's support hint "
              << path.support_hint() << "\n";
  }

  DiracDiscretization dd(grid);
  dd.n_ = n;
  dd.scheme_ = scheme;
  dd.boundary_ = boundary;
  dd.a_minus_ = path.a_minus();
  dd.a_plus_ = asymptote_plus(path);

  const Matrix& am = path.a_minus().entries();
  Matrix dt = time_derivative_matrix(grid, scheme, boundary);
  dd.d_ = kron_identity(dt, n);
  Matrix lap = kron_identity(second_difference(grid, boundary), n);
  dd.h1_ = lap;
  dd.h2_ = lap;

  double b_max = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double t = grid.node(k);
    const Matrix b = path.b(t);
    b_max = std::max(b_max, b.cwiseAbs().maxCoeff());
    const Matrix a = am + b;
    const Matrix a2 = a * a;
    const Matrix ap = bprime_at(path, t);
    dd.d_.block(k * n, k * n, n, n) += a;
    dd.h1_.block(k * n, k * n, n, n) += a2 - ap;
    dd.h2_.block(k * n, k * n, n, n) += a2 + ap;
  }
  dd.constant_ = b_max < 1e-14;

  if (max_threads() >= 2) {
    auto first = std::async(std::launch::async, eigenvalues_only, std::cref(dd.h1_));
    dd.h2_spec_ = eigenvalues_only(dd.h2_);
    dd.h1_spec_ = first.get();
  } else {
    dd.h1_spec_ = eigenvalues_only(dd.h1_);
    dd.h2_spec_ = eigenvalues_only(dd.h2_);
  }
  return dd;
}

IndexResult numeric_index(const DiracDiscretization& dd, double tol_factor) {
  std::vector<double> positive;
  std::vector<double> mags;
  for (const Vector* spec : {&dd.h1_spectrum(), &dd.h2_spectrum()}) {
    for (double v : *spec) {
      if (v > 0.0) positive.push_back(v);
      mags.push_back(std::abs(v));
    }
  }
  if (positive.empty()) throw ConvergenceError("numeric_index: no positive eigenvalues");
  const auto mid = positive.begin() + static_cast<std::ptrdiff_t>(positive.size() / 2);
  std::nth_element(positive.begin(), mid, positive.end());
  const double tau2 = tol_factor * *mid;

  IndexResult r;
  r.threshold = tau2;
  for (double v : dd.h1_spectrum()) r.kernel_h1 += std::abs(v) < tau2 ? 1 : 0;
  for (double v : dd.h2_spectrum()) r.kernel_h2 += std::abs(v) < tau2 ? 1 : 0;
  r.index = r.kernel_h1 - r.kernel_h2;

  double below = 0.0;
  double above = std::numeric_limits<double>::infinity();
  for (double m : mags) {
    if (m < tau2) {
      below = std::max(below, m);
    } else {
      above = std::min(above, m);
    }
  }
  r.gap_ratio = below > 0.0 ? above / below : std::numeric_limits<double>::infinity();
  if (r.gap_ratio < 100.0) {
    std::ostringstream msg;
    msg << "index not resolved at this resolution (gap ratio " << r.gap_ratio << ")";
    throw ConvergenceError(msg.str());
  }
  return r;
}

Complex resolvent_trace_diff(const DiracDiscretization& dd, Complex z) {
  auto trace = [z](const Vector& spec) {
    std::vector<Complex> terms(static_cast<std::size_t>(spec.size()));
    for (Eigen::Index i = 0; i < spec.size(); ++i) {
      const Complex denom = spec(i) - z;
      if (denom == Complex(0.0)) throw PreconditionError("resolvent_trace_diff: z is an eigenvalue");
      terms[static_cast<std::size_t>(i)] = 1.0 / denom;
    }
    return quad::pairwise_sum<Complex>(terms);
  };
  return trace(dd.h2_spectrum()) - trace(dd.h1_spectrum());
}

TraceCheck trace_formula_residual(const DiracDiscretization& dd, Complex z) {
  if (z.imag() == 0.0 && z.real() >= 0.0) {
    throw PreconditionError("trace_formula_residual: z must lie off [0, inf)");
  }
  TraceCheck c;
  c.lhs = resolvent_trace_diff(dd, z);
  c.rhs = (gz_trace(dd.a_plus(), z) - gz_trace(dd.a_minus(), z)) / (2.0 * z);
  c.residual = std::abs(c.lhs - c.rhs);
  return c;
}

TraceCheck trace_formula_residual(const OperatorPath& path, const TimeGrid& grid, Complex z) {
  return trace_formula_residual(build_dirac(path, grid), z);
}

StepFunction xi_h_counting(const DiracDiscretization& dd) {
  // Negative eigenvalues are discretization noise around the kernel; they are
  // counted at 0 so the function vanishes on (-inf, 0).
  const Vector h1 = dd.h1_spectrum().cwiseMax(0.0);
  const Vector h2 = dd.h2_spectrum().cwiseMax(0.0);
  const double scale = std::max(h1.maxCoeff(), h2.maxCoeff());
  const double tol = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale);
  return counting_difference(h1, h2, tol);
}

double xi_h_median(const DiracDiscretization& dd, double lo, double hi) {
  if (!(hi > lo)) throw PreconditionError("xi_h_median: empty interval");
  const StepFunction xi = xi_h_counting(dd);
  constexpr int kPoints = 201;
  std::vector<double> vals(kPoints);
  for (int i = 0; i < kPoints; ++i) vals[i] = xi(lo + (hi - lo) * i / (kPoints - 1));
  std::nth_element(vals.begin(), vals.begin() + kPoints / 2, vals.end());
  return vals[kPoints / 2];
}

double product_spectra_defect(const DiracDiscretization& dd) {
  const Matrix& d = dd.d_matrix();
  const Matrix dtd = d.transpose() * d;
  const Matrix ddt = d * d.transpose();
  Vector s1 = eigenvalues_only(0.5 * (dtd + dtd.transpose()));
  Vector s2 = eigenvalues_only(0.5 * (ddt + ddt.transpose()));
  const double top = std::max(s1.maxCoeff(), s2.maxCoeff());
  const double floor = 1e-7 * top;
  auto positive = [floor](const Vector& s) {
    std::vector<double> out;
    for (double v : s) {
      if (v > floor) out.push_back(v);
    }
    std::sort(out.rbegin(), out.rend());
    return out;
  };
  const std::vector<double> p1 = positive(s1);
  const std::vector<double> p2 = positive(s2);
  if (p1.size() != p2.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    worst = std::max(worst, std::abs(p1[i] - p2[i]) / std::max(p1[i], p2[i]));
  }
  return worst;
}

double r0_kernel_residual(const SymOp& a_minus, const TimeGrid& grid, Complex z, double collar) {
  const Eigen::Index n = a_minus.dim();
  const int nodes = grid.nodes();
  const double h = grid.spacing();

  const Matrix lap = kron_identity(second_difference(grid, Boundary::dirichlet), n);
  const Matrix a2 = a_minus.entries() * a_minus.entries();
  ComplexMatrix h0 = lap.cast<Complex>();
  for (int k = 0; k < nodes; ++k) {
    h0.block(k * n, k * n, n, n) += a2.cast<Complex>();
    h0.block(k * n, k * n, n, n).diagonal().array() -= z;
  }
  const ComplexMatrix g = h0.partialPivLu().inverse();

  std::vector<Complex> kappa(static_cast<std::size_t>(n));
  double min_re = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lam = a_minus.spectrum()(i);
    kappa[static_cast<std::size_t>(i)] = std::sqrt(Complex(lam * lam) - z);
    min_re = std::min(min_re, kappa[static_cast<std::size_t>(i)].real());
  }
  if (!(min_re > 0.0)) throw PreconditionError("r0_kernel_residual: z must lie off [min A^2, inf)");
  // Boundary reflections decay like exp(-2 kappa collar), about 1e-7 here.
  if (collar < 0.0) collar = 8.0 / min_re;
  const double limit = grid.half_width() - collar;

  const Matrix& v = a_minus.basis();
  const ComplexMatrix vc = v.cast<Complex>();
  double worst = 0.0;
  std::vector<ComplexMatrix> by_offset(static_cast<std::size_t>(nodes));
  for (int off = 0; off < nodes; ++off) {
    Eigen::VectorXcd diag(n);
    const double dist = off * h;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Complex kp = kappa[static_cast<std::size_t>(i)];
      diag(i) = 0.5 / kp * std::exp(-kp * dist);
    }
    by_offset[static_cast<std::size_t>(off)] = vc * diag.asDiagonal() * vc.adjoint();
  }
  for (int j = 0; j < nodes; ++j) {
    if (std::abs(grid.node(j)) > limit) continue;
    for (int k = 0; k < nodes; ++k) {
      if (std::abs(grid.node(k)) > limit) continue;
      const ComplexMatrix& r0 = by_offset[static_cast<std::size_t>(std::abs(j - k))];
      const ComplexMatrix diff = g.block(j * n, k * n, n, n) - h * r0;
      worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

std::vector<Complex> periodic_spectrum(const DiracDiscretization& dd) {
  if (dd.boundary() != Boundary::periodic) {
    throw PreconditionError("periodic_spectrum: requires periodic boundary");
  }
  if (!dd.constant_path()) throw PreconditionError("periodic_spectrum: requires a constant path");
  const int nodes = dd.grid().nodes();
  const Eigen::Index n = dd.fiber_dim();
  const Matrix dt = time_derivative_matrix(dd.grid(), dd.scheme(), dd.boundary());
  const ComplexMatrix am = dd.a_minus().entries().cast<Complex>();
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(nodes * n));
  const double pi = std::numbers::pi;
  for (int m = 0; m < nodes; ++m) {
    Complex symbol(0.0);
    for (int l = 0; l < nodes; ++l) {
      symbol += dt(l, 0) * std::polar(1.0, -2.0 * pi * m * l / nodes);
    }
    ComplexMatrix block = am;
    block.diagonal().array() += symbol;
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(block, false);
    if (solver.info() != Eigen::Success) throw ConvergenceError("periodic_spectrum: eigensolver failed");
    for (Eigen::Index i = 0; i < n; ++i) out.push_back(solver.eigenvalues()(i));
  }
  return out;
}

double spectrum_line_check(const DiracDiscretization& dd) {
  const std::vector<Complex> eig = periodic_spectrum(dd);
  const Vector& spec = dd.a_minus().spectrum();
  double worst = 0.0;
  for (const Complex& e : eig) {
    worst = std::max(worst, (spec.array() - e.real()).abs().minCoeff());
  }
  return worst;
}

double spectrum_line_check(const SymOp& a_minus, const TimeGrid& grid, Scheme scheme) {
  const OperatorPath path = OperatorPath::constant(a_minus, grid.half_width());
  return spectrum_line_check(build_dirac(path, grid, scheme, Boundary::periodic));
}

namespace {

constexpr char kMagic[4] = {'D', 'I', 'R', 'M'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFFu);
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double x) {
  const auto v = std::bit_cast<std::uint64_t>(x);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFFu);
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw PreconditionError("read_dirm: truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw PreconditionError("read_dirm: truncated data");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

void write_dirm(const std::string& path, const Matrix& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw PreconditionError("write_dirm: cannot open " + path);
  os.write(kMagic, 4);
  put_u32(os, static_cast<std::uint32_t>(m.rows()));
  put_u32(os, static_cast<std::uint32_t>(m.cols()));
  put_u32(os, 0);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) put_f64(os, m(i, j));
  }
  if (!os) throw PreconditionError("write_dirm: write failed for " + path);
}

Matrix read_dirm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PreconditionError("read_dirm: cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw PreconditionError("read_dirm: bad magic in " + path);
  }
  const std::uint32_t rows = get_u32(is);
  const std::uint32_t cols = get_u32(is);
  get_u32(is);
  Matrix m(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) m(i, j) = get_f64(is);
  }
  return m;
}

}  // namespace sfl
