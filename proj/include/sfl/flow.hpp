#pragma once

#include <optional>
#include <vector>

#include "json.hpp"
#include "sfl/matlin.hpp"
#include "sfl/oppath.hpp"

namespace sfl {

struct FlowConfig {
  double t0_scan_step = 0.5;
  /// Eigen-decompositions per candidate interval.
  int sample_density = 16;
  /// Maximum bisection depth for a single interval.
  int max_refine = 40;
  /// Extra subdivision points forced into the initial partition.
  std::vector<double> extra_points;
};

/// Witness for a spectral-flow value.
///
/// Interval j is [t_levels[j], t_levels[j+1]] with level epsilons[j]. For
/// every sample t in the interval, +-eps_j stay at distance >= margin from
/// spec A(t) and the eigenvalue count in [-eps_j, eps_j] is constant.
struct FlowCertificate {
  double t0 = 0.0;
  std::vector<double> t_levels;
  std::vector<double> epsilons;
  /// dim ran E_{A(t_{j})}([0, eps_j)) at the left end of interval j.
  std::vector<int> left_counts;
  /// dim ran E_{A(t_{j+1})}([0, eps_j)) at the right end of interval j.
  std::vector<int> right_counts;
  double margin = 0.0;

  /// Net number of eigenvalues crossing zero upward: sum(right - left).
  int flow() const;
  nlohmann::json to_json() const;
};

struct FlowResult {
  int flow = 0;
  FlowCertificate certificate;
};

/// Spectral flow of the path over the real line via a certified subdivision.
/// Throws PreconditionError when 0 is in the spectrum of either asymptote and
/// ConvergenceError when an interval cannot be certified within max_refine
/// bisections.
FlowResult spectral_flow(const OperatorPath& path, const FlowConfig& config = {});

/// Pair of orthogonal projections (symmetric, idempotent within 1e-10).
class ProjectionPair {
 public:
  ProjectionPair(Matrix p, Matrix q);
  const Matrix& p() const { return p_; }
  const Matrix& q() const { return q_; }

 private:
  Matrix p_;
  Matrix q_;
};

struct PairIndex {
  int index = 0;
  int dim_p_cap_qperp = 0;
  int dim_pperp_cap_q = 0;
  int trace_rounded = 0;
};

/// dim(ran P cap ran Q^perp) - dim(ran P^perp cap ran Q), cross-checked against
/// round(tr(P - Q)); disagreement raises ConsistencyError. Singular values
/// below rank_tol (1 + |M|) count as zero.
PairIndex fredholm_pair_index(const ProjectionPair& pair, double rank_tol = 1e-8);

/// E_{A}((-inf, 0)).
Matrix negative_projection(const SymOp& a);

struct ChainOptions {
  FlowConfig flow;
  double dirac_t = 12.0;
  int dirac_n = 400;
  double det_eps = 1e-4;
};

/// Six routes to the same integer.
struct ChainReport {
  int spectral_flow = 0;
  int pair_index = 0;
  int morse_trace = 0;
  int xi0 = 0;
  double xi0_h_median = 0.0;
  double det_xi0 = 0.0;
  bool all_equal = false;

  nlohmann::json to_json() const;
};

ChainReport morse_chain_report(const OperatorPath& path, const ChainOptions& options = {});

}  // namespace sfl
