#include "sfl/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sfl/dirac.hpp"
#include "sfl/error.hpp"
#include "sfl/ssf.hpp"

namespace sfl {

int FlowCertificate::flow() const {
  int total = 0;
  for (std::size_t j = 0; j < left_counts.size(); ++j) total += right_counts[j] - left_counts[j];
  return total;
}

nlohmann::json FlowCertificate::to_json() const {
  return {{"t0", t0},
          {"t_levels", t_levels},
          {"epsilons", epsilons},
          {"left_counts", left_counts},
          {"right_counts", right_counts},
          {"margin", margin},
          {"flow", flow()}};
}

namespace {

struct Interval {
  double a;
  double b;
};

struct Certified {
  double eps = 0.0;
  double margin = 0.0;
  int left = 0;
  int right = 0;
};

double spectral_norm_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Tries to certify [a, b]; returns nullopt when the interval must be split.
std::optional<Certified> certify(const OperatorPath& path, Interval iv, int samples, double cap) {
  const int m = std::max(samples, 3);
  const double delta = (iv.b - iv.a) / (m - 1);
  std::vector<SymOp> ops;
  ops.reserve(m);
  double lipschitz = 0.0;
  for (int i = 0; i < m; ++i) {
    const double t = (i + 1 == m) ? iv.b : iv.a + i * delta;
    ops.push_back(a_of(path, t));
    if (path.has_bprime()) lipschitz = std::max(lipschitz, spectral_norm_sym(path.bprime(t)));
  }
  if (!path.has_bprime()) {
    for (int i = 1; i < m; ++i) {
      const double jump = (ops[i].spectrum() - ops[i - 1].spectrum()).cwiseAbs().maxCoeff();
      lipschitz = std::max(lipschitz, jump / delta);
    }
  }
  // Safety factor on the sampled Lipschitz bound; an eigenvalue is never
  // farther than delta/2 from a sample, so it moves at most L delta / 2.
  const double drift = 1.25 * lipschitz * delta;

  std::vector<double> levels{0.0, cap};
  for (const SymOp& op : ops) {
    for (Eigen::Index k = 0; k < op.dim(); ++k) {
      const double x = std::abs(op.spectrum()(k));
      if (x < cap) levels.push_back(x);
    }
  }
  std::sort(levels.begin(), levels.end());

  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    const double lo = levels[k];
    const double hi = levels[k + 1];
    if (hi <= lo) continue;
    const double eps = 0.5 * (lo + hi);
    const double margin = 0.5 * (hi - lo);
    if (margin < 0.25 * eps || margin < drift) continue;
    // Constant count in [-eps, eps] across the grid.
    const int c0 = count_in(ops.front(), -eps, std::nextafter(eps, INFINITY));
    bool constant = true;
    for (const SymOp& op : ops) {
      if (count_in(op, -eps, std::nextafter(eps, INFINITY)) != c0) {
        constant = false;
        break;
      }
    }
    if (!constant) continue;
    Certified c;
    c.eps = eps;
    c.margin = margin;
    c.left = count_in(ops.front(), 0.0, eps);
    c.right = count_in(ops.back(), 0.0, eps);
    return c;
  }
  return std::nullopt;
}

double find_t0(const OperatorPath& path, double gap, double step) {
  double t0 = path.support_hint();
  for (int iter = 0; iter < 100000; ++iter, t0 += step) {
    bool ok = true;
    for (double t : {t0, t0 + step, 2.0 * t0}) {
      for (double sign : {-1.0, 1.0}) {
        if (a_of(path, sign * t).min_abs_eigenvalue() <= 0.5 * gap) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) return t0;
  }
  throw ConvergenceError("spectral_flow: no T0 found with A(t) invertible beyond it");
}

}  // namespace

FlowResult spectral_flow(const OperatorPath& path, const FlowConfig& config) {
  const SymOp a_minus = path.a_minus();
  const SymOp a_plus = asymptote_plus(path);
  const double scale = 1.0 + std::max(a_minus.norm(), a_plus.norm());
  const double gap = std::min(a_minus.min_abs_eigenvalue(), a_plus.min_abs_eigenvalue());
  if (gap <= 1e-12 * scale) {
    throw PreconditionError("spectral_flow: 0 lies in the spectrum of an asymptote");
  }
  if (!(config.t0_scan_step > 0.0)) throw PreconditionError("spectral_flow: t0_scan_step must be > 0");

  FlowCertificate cert;
  cert.t0 = find_t0(path, gap, config.t0_scan_step);
  cert.margin = std::numeric_limits<double>::infinity();

  std::vector<double> cuts{-cert.t0, cert.t0};
  for (double t : config.extra_points) {
    if (t > -cert.t0 && t < cert.t0) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Depth-first, left to right, so t_levels come out ascending.
  struct Pending {
    Interval iv;
    int depth;
  };
  std::vector<Pending> stack;
  for (std::size_t i = cuts.size() - 1; i > 0; --i) stack.push_back({{cuts[i - 1], cuts[i]}, 0});
  cert.t_levels.push_back(cuts.front());
  while (!stack.empty()) {
    const Pending cur = stack.back();
    stack.pop_back();
    const auto ok = certify(path, cur.iv, config.sample_density, gap);
    if (ok) {
      cert.t_levels.push_back(cur.iv.b);
      cert.epsilons.push_back(ok->eps);
      cert.left_counts.push_back(ok->left);
      cert.right_counts.push_back(ok->right);
      cert.margin = std::min(cert.margin, ok->margin);
      continue;
    }
    if (cur.depth >= config.max_refine) {
      std::ostringstream msg;
      msg << "spectral_flow: certification failed on [" << cur.iv.a << ", " << cur.iv.b
          << "] after " << config.max_refine << " refinements";
      throw ConvergenceError(msg.str());
    }
    const double mid = 0.5 * (cur.iv.a + cur.iv.b);
    stack.push_back({{mid, cur.iv.b}, cur.depth + 1});
    stack.push_back({{cur.iv.a, mid}, cur.depth + 1});
  }
  FlowResult out;
  out.flow = cert.flow();
  out.certificate = std::move(cert);
  return out;
}

ProjectionPair::ProjectionPair(Matrix p, Matrix q) : p_(std::move(p)), q_(std::move(q)) {
  for (const Matrix* m : {&p_, &q_}) {
    if (m->rows() != m->cols() || m->rows() != p_.rows()) {
      throw PreconditionError("ProjectionPair: projections must be square with equal dimension");
    }
    if (max_asymmetry(*m) > 1e-10) throw PreconditionError("ProjectionPair: projection not symmetric");
    if ((*m * *m - *m).norm() >= 1e-10) throw PreconditionError("ProjectionPair: not idempotent");
  }
}

namespace {

/// Orthonormal basis of the range of a projection (eigenvalue ~ 1).
Matrix range_basis(const Matrix& proj, bool complement) {
  const SymOp op = eig_sym(0.5 * (proj + proj.transpose()));
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < op.dim(); ++j) {
    const bool one = op.spectrum()(j) > 0.5;
    if (one != complement) cols.push_back(j);
  }
  Matrix basis(op.dim(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) basis.col(static_cast<Eigen::Index>(k)) = op.basis().col(cols[k]);
  return basis;
}

int numerical_rank(const Matrix& m, double rank_tol) {
  if (m.cols() == 0 || m.rows() == 0) return 0;
  const Vector sv = Eigen::JacobiSVD<Matrix>(m).singularValues();
  const double threshold = rank_tol * (1.0 + sv(0));
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) >= threshold ? 1 : 0;
  return rank;
}

int intersection_dim(const Matrix& u, const Matrix& v, double rank_tol) {
  if (u.cols() == 0 || v.cols() == 0) return 0;
  Matrix stacked(u.rows(), u.cols() + v.cols());
  stacked << u, v;
  return static_cast<int>(u.cols() + v.cols()) - numerical_rank(stacked, rank_tol);
}

}  // namespace

PairIndex fredholm_pair_index(const ProjectionPair& pair, double rank_tol) {
  const Matrix p = range_basis(pair.p(), false);
  const Matrix p_perp = range_basis(pair.p(), true);
  const Matrix q = range_basis(pair.q(), false);
  const Matrix q_perp = range_basis(pair.q(), true);
  PairIndex out;
  out.dim_p_cap_qperp = intersection_dim(p, q_perp, rank_tol);
  out.dim_pperp_cap_q = intersection_dim(p_perp, q, rank_tol);
  out.index = out.dim_p_cap_qperp - out.dim_pperp_cap_q;
  out.trace_rounded = static_cast<int>(std::lround((pair.p() - pair.q()).trace()));
  if (out.index != out.trace_rounded) {
    std::ostringstream msg;
    msg << "fredholm_pair_index: intersection index " << out.index << " disagrees with tr(P - Q) = "
        << (pair.p() - pair.q()).trace();
    throw ConsistencyError(msg.str());
  }
  return out;
}

Matrix negative_projection(const SymOp& a) {
  return spectral_projection(a, [](double x) { return x < 0.0; });
}

nlohmann::json ChainReport::to_json() const {
  return {{"spectral_flow", spectral_flow}, {"pair_index", pair_index},
          {"morse_trace", morse_trace},     {"xi0", xi0},
          {"xi0_H_median", xi0_h_median},   {"det_xi0", det_xi0},
          {"pass", all_equal}};
}

ChainReport morse_chain_report(const OperatorPath& path, const ChainOptions& options) {
  const SymOp a_minus = path.a_minus();
  const SymOp a_plus = asymptote_plus(path);
  ChainReport rep;
  rep.spectral_flow = spectral_flow(path, options.flow).flow;

  const Matrix e_minus = negative_projection(a_minus);
  const Matrix e_plus = negative_projection(a_plus);
  rep.pair_index = fredholm_pair_index(ProjectionPair(e_minus, e_plus)).index;
  rep.morse_trace = static_cast<int>(std::lround((e_minus - e_plus).trace()));
  const double xi0 = xi_counting(a_plus, a_minus)(0.0);
  rep.xi0 = static_cast<int>(std::lround(xi0));

  const DiracDiscretization dd =
      build_dirac(path, TimeGrid(options.dirac_t, options.dirac_n), Scheme::upwind, Boundary::dirichlet);
  const double gap = std::min(a_minus.min_abs_eigenvalue(), a_plus.min_abs_eigenvalue());
  rep.xi0_h_median = xi_h_median(dd, 0.1 * gap * gap, 0.9 * gap * gap);
  rep.det_xi0 = xi_from_det(a_plus, a_minus, 0.0, options.det_eps);

  const int ref = rep.spectral_flow;
  rep.all_equal = rep.pair_index == ref && rep.morse_trace == ref && rep.xi0 == ref &&
                  rep.xi0_h_median == static_cast<double>(ref) &&
                  std::abs(rep.det_xi0 - ref) < 1e-3;
  return rep;
}

}  // namespace sfl
