#include "sfl/ssf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sfl/error.hpp"
#include "sfl/quadrature.hpp"

namespace sfl {

double g_fn(double x) { return x / std::sqrt(x * x + 1.0); }

double g_inverse(double omega) {
  if (!(std::abs(omega) < 1.0)) {
    std::ostringstream msg;
    msg << "g_inverse: argument " << omega << " outside (-1, 1)";
    throw DomainError(msg.str());
  }
  return omega / std::sqrt((1.0 - omega) * (1.0 + omega));
}

Complex gz_fn(double x, Complex z) { return x / std::sqrt(Complex(x * x) - z); }

namespace {

void require_same_dim(const SymOp& a, const SymOp& b, const char* who) {
  if (a.dim() != b.dim()) {
    throw PreconditionError(std::string(who) + ": operators have different dimensions");
  }
}

void require_off_positive_axis(Complex z, const char* who) {
  if (z.imag() == 0.0 && z.real() >= 0.0) {
    throw PreconditionError(std::string(who) + ": z must lie off [0, inf)");
  }
}

}  // namespace

StepFunction counting_difference(const Vector& first, const Vector& second, double cluster_tol) {
  std::vector<double> a(first.data(), first.data() + first.size());
  std::vector<double> b(second.data(), second.data() + second.size());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> all(a);
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  auto count_le = [](const std::vector<double>& v, double x) {
    return static_cast<double>(std::upper_bound(v.begin(), v.end(), x) - v.begin());
  };

  std::vector<double> bps;
  std::vector<double> vals{0.0};
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j + 1 < all.size() && all[j + 1] - all[j] <= cluster_tol) ++j;
    const double right_edge = all[j];
    bps.push_back(all[i]);
    vals.push_back(count_le(a, right_edge) - count_le(b, right_edge));
    i = j + 1;
  }
  return StepFunction(std::move(bps), std::move(vals));
}

StepFunction xi_counting(const SymOp& a_plus, const SymOp& a_minus) {
  require_same_dim(a_plus, a_minus, "xi_counting");
  const double scale = std::max(a_plus.norm(), a_minus.norm());
  const double tol = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale);
  return counting_difference(a_minus.spectrum(), a_plus.spectrum(), tol);
}

StepFunction xi_invariance(const SymOp& a_plus, const SymOp& a_minus) {
  require_same_dim(a_plus, a_minus, "xi_invariance");
  const SymOp gp = eig_sym(apply_fn(a_plus, g_fn));
  const SymOp gm = eig_sym(apply_fn(a_minus, g_fn));
  const StepFunction in_omega = xi_counting(gp, gm);
  std::vector<double> bps;
  bps.reserve(in_omega.breakpoints().size());
  for (double w : in_omega.breakpoints()) bps.push_back(g_inverse(w));
  return StepFunction(std::move(bps), in_omega.values());
}

namespace {

void require_resolvent(const SymOp& a, Complex z, const char* who) {
  const double tol = 1e-14 * (1.0 + a.norm());
  for (Eigen::Index j = 0; j < a.dim(); ++j) {
    if (std::abs(z - a.spectrum()(j)) <= tol) {
      std::ostringstream msg;
      msg << who << ": z = " << z << " lies on the spectrum (eigenvalue " << a.spectrum()(j) << ")";
      throw PreconditionError(msg.str());
    }
  }
}

ComplexMatrix shifted(const SymOp& a, Complex z) {
  ComplexMatrix m = a.entries().cast<Complex>();
  m.diagonal().array() -= z;
  return m;
}

double wrap_phase(double phase) {
  double w = std::remainder(phase, 2.0 * std::numbers::pi);
  if (w <= -std::numbers::pi) w += 2.0 * std::numbers::pi;
  return w;
}

}  // namespace

Complex log_pert_det_unwrapped(const SymOp& a_plus, const SymOp& a_minus, Complex z) {
  require_same_dim(a_plus, a_minus, "pert_det");
  require_resolvent(a_plus, z, "pert_det");
  require_resolvent(a_minus, z, "pert_det");
  return log_det(shifted(a_plus, z)) - log_det(shifted(a_minus, z));
}

Complex pert_det_direct(const SymOp& a_plus, const SymOp& a_minus, Complex z) {
  require_same_dim(a_plus, a_minus, "pert_det_direct");
  const Eigen::Index n = a_plus.dim();
  const ComplexMatrix resolvent = shifted(a_minus, z).partialPivLu().inverse();
  const ComplexMatrix m = ComplexMatrix::Identity(n, n) +
                          (a_plus.entries() - a_minus.entries()).cast<Complex>() * resolvent;
  return m.determinant();
}

Complex pert_det(const SymOp& a_plus, const SymOp& a_minus, Complex z) {
  const Complex value = std::exp(log_pert_det_unwrapped(a_plus, a_minus, z));
#ifndef NDEBUG
  const Complex direct = pert_det_direct(a_plus, a_minus, z);
  if (std::abs(direct - value) > 1e-8 * std::max(1.0, std::abs(value))) {
    std::ostringstream msg;
    msg << "pert_det: ratio form " << value << " and direct form " << direct << " disagree";
    throw ConsistencyError(msg.str());
  }
#endif
  return value;
}

double branch_start_height(const SymOp& a_plus, const SymOp& a_minus) {
  double y = 10.0 * (a_plus.norm() + a_minus.norm() + 1.0);
  for (int k = 0; k < 16; ++k) {
    const Complex ld = log_pert_det_unwrapped(a_plus, a_minus, Complex(0.0, y));
    const Complex principal(ld.real(), wrap_phase(ld.imag()));
    if (std::abs(principal) < 1e-6) return y;
    y *= 10.0;
  }
  throw ConvergenceError("logdet_branch: no normalization height found below 1e22");
}

BranchTrace logdet_branch(const SymOp& a_plus, const SymOp& a_minus, Complex target) {
  if (!(target.imag() > 0.0)) throw PreconditionError("logdet_branch: target must have Im > 0");
  BranchTrace trace;
  trace.target = target;
  trace.start_height = branch_start_height(a_plus, a_minus);
  const Complex start(0.0, trace.start_height);
  auto point = [&](double s) { return s >= 1.0 ? target : start + s * (target - start); };
  auto raw = [&](double s) { return log_pert_det_unwrapped(a_plus, a_minus, point(s)); };
  auto increment = [](Complex from, Complex to) {
    const Complex d = to - from;
    return Complex(d.real(), wrap_phase(d.imag()));
  };

  Complex raw_here = raw(0.0);
  Complex ld(raw_here.real(), wrap_phase(raw_here.imag()));
  trace.waypoints.emplace_back(start, ld);

  // Each factor ln(lambda - z) turns by less than pi/(4 * 2n) over a step no
  // longer than sin(pi/(8n)) * dist(z, spectra), so the summed increment stays
  // below a quarter turn and cannot alias a full winding.
  const double n_terms = static_cast<double>(a_plus.dim() + a_minus.dim());
  const double reach = std::sin(std::numbers::pi / (4.0 * n_terms));
  auto spectral_distance = [&](Complex z) {
    double d = std::numeric_limits<double>::infinity();
    for (const SymOp* op : {&a_plus, &a_minus}) {
      for (double lam : op->spectrum()) d = std::min(d, std::abs(Complex(lam) - z));
    }
    return d;
  };
  const double path_length = std::abs(target - start);

  constexpr double kQuarterTurn = 0.5 * std::numbers::pi;
  constexpr long kMaxSteps = 1'000'000;
  double s = 0.0;
  double ds = 1.0 / 1024.0;
  long steps = 0;
  while (s < 1.0) {
    if (++steps > kMaxSteps) {
      std::ostringstream msg;
      msg << "logdet_branch: more than " << kMaxSteps << " steps near z = " << point(s);
      throw ConvergenceError(msg.str());
    }
    ds = std::min({ds, 1.0 - s, reach * spectral_distance(point(s)) / path_length});
    const double s_next = (ds >= 1.0 - s) ? 1.0 : s + ds;
    const Complex raw_mid = raw(0.5 * (s + s_next));
    const Complex raw_next = raw(s_next);
    const Complex full = increment(raw_here, raw_next);
    const Complex first = increment(raw_here, raw_mid);
    const Complex second = increment(raw_mid, raw_next);
    const Complex halves = first + second;
    const bool small = std::abs(full.imag()) < kQuarterTurn && std::abs(first.imag()) < kQuarterTurn &&
                       std::abs(second.imag()) < kQuarterTurn;
    const bool consistent = std::abs(full - halves) < 1e-8 * (1.0 + std::abs(full));
    if (!(small && consistent)) {
      ds *= 0.5;
      if (ds < 1e-300) throw ConvergenceError("logdet_branch: step size underflow");
      continue;
    }
    ld += halves;
    raw_here = raw_next;
    s = s_next;
    trace.waypoints.emplace_back(point(s), ld);
    ds *= 2.0;
  }
  trace.total_arg = ld.imag();
  return trace;
}

double xi_from_det(const SymOp& a_plus, const SymOp& a_minus, double lambda, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("xi_from_det: eps must be positive");
  const BranchTrace trace = logdet_branch(a_plus, a_minus, Complex(lambda, eps));
  return trace.logdet().imag() / std::numbers::pi;
}

TraceCheck krein_residual(const SymOp& a_plus, const SymOp& a_minus,
                          const std::function<double(double)>& f,
                          const std::function<double(double)>& fprime) {
  const StepFunction xi = xi_counting(a_plus, a_minus);
  TraceCheck out;
  out.lhs = (apply_fn(a_plus, f) - apply_fn(a_minus, f)).trace();
  double rhs = 0.0;
  for (const auto& piece : xi.support_pieces()) {
    rhs += piece.value * quad::integrate(fprime, piece.lo, piece.hi);
  }
  out.rhs = rhs;
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

TraceCheck resolvent_trace_residual(const SymOp& a_plus, const SymOp& a_minus, Complex z) {
  require_resolvent(a_plus, z, "resolvent_trace_residual");
  require_resolvent(a_minus, z, "resolvent_trace_residual");
  auto resolvent_trace = [z](const SymOp& a) {
    Complex t = 0.0;
    for (Eigen::Index j = 0; j < a.dim(); ++j) t += 1.0 / (a.spectrum()(j) - z);
    return t;
  };
  TraceCheck out;
  out.lhs = -(resolvent_trace(a_plus) - resolvent_trace(a_minus));
  Complex rhs = 0.0;
  for (const auto& piece : xi_counting(a_plus, a_minus).support_pieces()) {
    rhs += piece.value * (1.0 / (piece.lo - z) - 1.0 / (piece.hi - z));
  }
  out.rhs = rhs;
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

Complex gz_trace(const SymOp& a, Complex z) {
  Complex t = 0.0;
  for (Eigen::Index j = 0; j < a.dim(); ++j) t += gz_fn(a.spectrum()(j), z);
  return t;
}

TraceCheck gz_trace_residual(const SymOp& a_plus, const SymOp& a_minus, Complex z) {
  require_off_positive_axis(z, "gz_trace_residual");
  TraceCheck out;
  auto gz = [z](double x) { return gz_fn(x, z); };
  out.lhs = apply_fn_complex(a_plus, gz).trace() - apply_fn_complex(a_minus, gz).trace();
  auto kernel = [z](double nu) {
    const Complex w = Complex(nu * nu) - z;
    return 1.0 / (w * std::sqrt(w));
  };
  Complex rhs = 0.0;
  for (const auto& piece : xi_counting(a_plus, a_minus).support_pieces()) {
    rhs += piece.value * quad::integrate_complex(kernel, piece.lo, piece.hi);
  }
  out.rhs = -z * rhs;
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

TraceCheck dz_trace_residual(const SymOp& a_plus, const SymOp& a_minus, Complex z, double h) {
  require_off_positive_axis(z, "dz_trace_residual");
  require_off_positive_axis(z + h, "dz_trace_residual");
  require_off_positive_axis(z - h, "dz_trace_residual");
  auto diff = [&](Complex w) { return gz_trace(a_plus, w) - gz_trace(a_minus, w); };
  auto kernel_trace = [z](const SymOp& a) {
    Complex t = 0.0;
    for (Eigen::Index j = 0; j < a.dim(); ++j) {
      const double x = a.spectrum()(j);
      const Complex w = Complex(x * x) - z;
      t += x / (w * std::sqrt(w));
    }
    return t;
  };
  TraceCheck out;
  out.lhs = (diff(z + h) - diff(z - h)) / (2.0 * h);
  out.rhs = 0.5 * (kernel_trace(a_plus) - kernel_trace(a_minus));
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace sfl
