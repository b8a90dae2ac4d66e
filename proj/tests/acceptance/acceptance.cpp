// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sfl/dirac.hpp"
#include "sfl/doi.hpp"
#include "sfl/flow.hpp"
#include "sfl/scenarios.hpp"
#include "sfl/special_functions.hpp"
#include "sfl/ssf.hpp"
#include "sfl/transforms.hpp"
#include "test_support.hpp"

using namespace sfl;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

StepFunction tanh2_xi() {
  const OperatorPath p = scenarios::tanh2();
  return xi_counting(asymptote_plus(p), p.a_minus());
}

OperatorPath custom_scenario() {
  const nlohmann::json doc = {
      {"scenario", "custom"},
      {"params",
       {{"a_minus", {{-1.0, 0.2, 0.0}, {0.2, 0.5, 0.0}, {0.0, 0.0, 2.0}}},
        {"tanh_coeffs", {{{1.0, 0.0, 0.2}, {0.0, -0.5, 0.0}, {0.2, 0.0, -1.5}}, {{0.1, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.1}}}}}}};
  return scenarios::from_config(doc);
}

std::vector<std::pair<std::string, OperatorPath>> gallery() {
  return {{"tanh2", scenarios::tanh2()},         {"tanh2-reversed", scenarios::tanh2_reversed()},
          {"tanh-mixed", scenarios::tanh_mixed()}, {"rot2", scenarios::rot2()},
          {"lattice1d", scenarios::lattice1d()},   {"custom", custom_scenario()}};
}

// 1. Equality chain on tanh2.
void chain(Outcome& o) {
  const auto start = Clock::now();
  const ChainReport r = morse_chain_report(scenarios::tanh2());
  const double elapsed = seconds_since(start);
  o.detail << "flow=" << r.spectral_flow << " pair_index=" << r.pair_index << " morse_trace=" << r.morse_trace
           << " xi0=" << r.xi0 << " det_xi0=" << r.det_xi0 << " time=" << elapsed << "s";
  o.require(r.spectral_flow == 2 && r.pair_index == 2 && r.morse_trace == 2 && r.xi0 == 2, "integer chain = 2");
  o.require(std::abs(r.det_xi0 - 2.0) < 1e-3, "|det_xi0 - 2| < 1e-3");
  o.require(elapsed < 5.0, "runtime < 5 s");
}

// 2. Discretized index.
void discretized_index(Outcome& o) {
  const auto start = Clock::now();
  const OperatorPath p = scenarios::tanh2();
  const std::vector<std::pair<double, int>> grids = {{12.0, 400}, {12.0, 800}, {16.0, 800}};
  for (const auto& [t, n] : grids) {
    const IndexResult r = numeric_index(build_dirac(p, TimeGrid(t, n)));
    o.detail << "(T=" << t << ",N=" << n << "): index=" << r.index << " gap=" << r.gap_ratio << "; ";
    o.require(r.index == 2, "index = 2");
    o.require(r.gap_ratio >= 100.0, "gap ratio >= 100");
  }
  const double elapsed = seconds_since(start);
  o.detail << "time=" << elapsed << "s";
  o.require(elapsed < 60.0, "runtime < 60 s");
}

// 3. Resolvent trace formula at z = -1.
void trace_formula(Outcome& o) {
  const OperatorPath p = scenarios::tanh2();
  const Complex z(-1.0, 0.0);
  const Complex coarse = resolvent_trace_diff(build_dirac(p, TimeGrid(12.0, 400)), z);
  const Complex fine = resolvent_trace_diff(build_dirac(p, TimeGrid(12.0, 800)), z);
  const double err400 = std::abs(coarse - (-std::sqrt(2.0)));
  const double err800 = std::abs(fine - (-std::sqrt(2.0)));
  o.detail << "N=400: " << coarse.real() << " (err " << err400 << "), N=800: " << fine.real() << " (err " << err800
           << ")";
  o.require(err400 < 0.05, "|trace + sqrt2| < 0.05 at N=400");
  o.require(err800 < err400, "residual shrinks at N=800");
}

// 4. Abel transform of xi and the discretized xi_H.
void pushnitski(Outcome& o) {
  const StepFunction xi = tanh2_xi();
  double worst = 0.0;
  for (int k = 1; k < 1000; ++k) {
    const double l = 0.001 * k;
    worst = std::max(worst, std::abs(abel_forward(xi, l) - 2.0));
  }
  for (int k = 1; k <= 2000; ++k) {
    const double l = 1.0 + 0.05 * k;
    const double expected = 4.0 / std::numbers::pi * std::asin(1.0 / std::sqrt(l));
    worst = std::max(worst, std::abs(abel_forward(xi, l) - expected));
  }
  const DiracDiscretization dd = build_dirac(scenarios::tanh2(), TimeGrid(12.0, 400));
  const double median = xi_h_median(dd, 0.1, 0.9);
  o.detail << "max closed-form error=" << worst << " discretized median=" << median;
  o.require(worst < 1e-14, "closed form to machine precision");
  o.require(median == 2.0, "median xi_H = 2 on (0.1, 0.9)");
}

// 5. Krein and trace identities on random pairs.
void trace_identities(Outcome& o) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 12);
  std::normal_distribution<double> normal;
  std::vector<Complex> zs;
  for (int i = 0; i < 20; ++i) {
    Complex z(2.0 * normal(rng), normal(rng));
    if (std::abs(z.imag()) < 0.05) z.imag(0.05 + std::abs(z.imag()));
    zs.push_back(z);
  }
  const std::vector<Complex> gz_points = {Complex(-1.0, 0.0), Complex(-4.0, 0.0), Complex(-3.0, 2.0)};
  double krein = 0.0;
  double resolvent = 0.0;
  double gz = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = dim(rng);
    const Matrix a = testing::random_symmetric(rng, n);
    const Matrix b = testing::random_symmetric(rng, n);
    const SymOp am = eig_sym(a);
    const SymOp ap = eig_sym(a + b);
    krein = std::max(krein, krein_residual(
                                ap, am, [](double x) { return std::exp(-x * x); },
                                [](double x) { return -2.0 * x * std::exp(-x * x); })
                                .residual);
    krein = std::max(krein, krein_residual(
                                ap, am, [](double x) { return std::atan(x); },
                                [](double x) { return 1.0 / (1.0 + x * x); })
                                .residual);
    for (const Complex& z : zs) resolvent = std::max(resolvent, resolvent_trace_residual(ap, am, z).residual);
    for (const Complex& z : gz_points) gz = std::max(gz, gz_trace_residual(ap, am, z).residual);
  }
  const SymOp ap = eig_sym(testing::random_symmetric(rng, 4));
  const SymOp am = eig_sym(testing::random_symmetric(rng, 4));
  const double d1 = dz_trace_residual(ap, am, Complex(-1.0, 0.0), 1e-2).residual;
  const double d2 = dz_trace_residual(ap, am, Complex(-1.0, 0.0), 5e-3).residual;
  const double ratio = d1 / d2;
  o.detail << "krein=" << krein << " resolvent=" << resolvent << " gz=" << gz << " dz ratio=" << ratio;
  o.require(krein < 1e-8, "krein residual < 1e-8");
  o.require(resolvent < 1e-9, "resolvent residual < 1e-9");
  o.require(gz < 1e-8, "g_z residual < 1e-8");
  o.require(ratio >= 3.5 && ratio <= 4.5, "dz ratio in [3.5, 4.5]");
}

// 6. Double operator integral.
void doi(Outcome& o) {
  const DOIQuadrature quad = make_doi_quadrature(8.0, 400);
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> size(0.05, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index n = dim(rng);
    const Matrix a = testing::random_symmetric(rng, n, 1.5);
    Matrix b = testing::random_symmetric(rng, n);
    b *= size(rng) / operator_norm(b);
    worst = std::max(worst, g_diff_via_doi(eig_sym(a + b), eig_sym(a), quad).residual);
  }
  const SymOp three = eig_sym(Matrix::Constant(1, 1, 3.0));
  const SymOp one = eig_sym(Matrix::Constant(1, 1, 1.0));
  const double scalar_err = std::abs(g_diff_via_doi(three, one, quad).value(0, 0) - (g_fn(3.0) - g_fn(1.0)));
  o.detail << "max residual=" << worst << " scalar error=" << scalar_err;
  o.require(worst < 1e-6, "trace-norm residual < 1e-6");
  o.require(scalar_err < 1e-8, "scalar closed form to 1e-8");
}

// 7. Eta invariants.
void eta(Outcome& o) {
  const StepFunction xi = tanh2_xi();
  const double closed = eta_closed(xi, 1.0);
  const double zeta = eta_zeta(xi, 1.0, 1e-3);
  const double heat = eta_heat(xi, 1.0, 1e-3);
  const double zeta_route = std::abs(eta_zeta_via_abel(xi, 1.0, 1e-3) - zeta);
  const double heat_route = std::abs(eta_heat_via_abel(xi, 1.0, 1e-3) - heat);
  o.detail << "closed=" << closed << " zeta=" << zeta << " heat=" << heat << " zeta two-route=" << zeta_route
           << " heat two-route=" << heat_route;
  o.require(std::abs(closed + 1.0) <= 4.0 * std::numeric_limits<double>::epsilon(), "closed form = -1");
  o.require(std::abs(zeta + 1.0) < 1e-3, "|eta_zeta + 1| < 1e-3");
  o.require(std::abs(heat + 1.0) < 5e-2, "|eta_heat + 1| < 5e-2");
  o.require(zeta_route < 1e-5, "zeta two-route within 1e-5");
  o.require(heat_route < 1e-4, "heat two-route within 1e-4");
}

// 8. Structural invariants.
void structural(Outcome& o) {
  int xi_mismatch = 0;
  int flow_mismatch = 0;
  for (const auto& [name, path] : gallery()) {
    const SymOp ap = asymptote_plus(path);
    const StepFunction a = xi_counting(ap, path.a_minus());
    const StepFunction b = xi_invariance(ap, path.a_minus());
    if (a.values() != b.values() || !approx_equal(a, b, 1e-10)) {
      ++xi_mismatch;
      o.detail << name << ": xi mismatch; ";
    }
    const int base = spectral_flow(path).flow;
    FlowConfig refined;
    refined.extra_points = {-7.1, -2.0, -0.3, 0.0, 0.25, 1.1, 4.4};
    const int sub = spectral_flow(path, refined).flow;
    const OperatorPath q = reparameterize(
        path, [](double t) { return t + 0.5 * std::sin(t) + 0.7; },
        [](double t) { return 1.0 + 0.5 * std::cos(t); }, path.support_hint() + 2.0);
    const int rep = spectral_flow(q).flow;
    if (sub != base || rep != base) {
      ++flow_mismatch;
      o.detail << name << ": flow " << base << "/" << sub << "/" << rep << "; ";
    }
  }
  const double defect = product_spectra_defect(build_dirac(scenarios::tanh2(), TimeGrid(12.0, 400)));
  double whittaker = 0.0;
  for (double z : {0.5, 1.0, 2.0}) {
    const double rhs = std::sqrt(z / std::numbers::pi) * bessel_k0(0.5 * z);
    whittaker = std::max(whittaker, std::abs(whittaker_w(0.0, 0.0, z) - rhs) / rhs);
  }
  o.detail << "xi mismatches=" << xi_mismatch << " flow mismatches=" << flow_mismatch
           << " D^TD/DD^T defect=" << defect << " W00 rel err=" << whittaker;
  o.require(xi_mismatch == 0, "xi_invariance = xi_counting");
  o.require(flow_mismatch == 0, "flow subdivision/reparameterization invariance");
  o.require(defect < 1e-8, "positive spectra agree to 1e-8");
  o.require(whittaker < 1e-8, "W00 identity to 1e-8");
}

// 9. Truncation convergence on lattice1d.
void truncation(Outcome& o) {
  const OperatorPath path = scenarios::lattice1d();
  const SymOp ap = asymptote_plus(path);
  const Matrix full = apply_fn(ap, g_fn) - apply_fn(path.a_minus(), g_fn);
  const double top = path.a_minus().norm();
  std::vector<double> levels;
  for (int j = 1; j <= 8; ++j) levels.push_back(top * j / 8.0);
  levels.push_back(2.0 * top);
  std::vector<double> errors;
  for (double level : levels) {
    const OperatorPath cut = truncate(path, level);
    const Matrix part = apply_fn(asymptote_plus(cut), g_fn) - apply_fn(cut.a_minus(), g_fn);
    errors.push_back(trace_norm(Matrix(full - part)));
    o.detail << errors.back() << (level == levels.back() ? "" : " > ");
  }
  bool monotone = true;
  for (std::size_t i = 1; i < errors.size(); ++i) monotone = monotone && errors[i] <= errors[i - 1];
  o.require(monotone, "error decreases along the sweep");
  o.require(errors.front() > errors[errors.size() - 2], "sweep makes progress");
  o.require(errors.back() == 0.0, "zero at full rank");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"equality chain on tanh2", chain},
      {"discretized index", discretized_index},
      {"resolvent trace formula", trace_formula},
      {"Abel transform of xi", pushnitski},
      {"Krein and trace identities", trace_identities},
      {"double operator integral", doi},
      {"eta invariants", eta},
      {"structural invariants", structural},
      {"truncation convergence", truncation},
  };
  int failures = 0;
  int id = 0;
  for (const auto& [name, check] : criteria) {
    ++id;
    Outcome o;
    try {
      check(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    if (!o.pass) ++failures;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
