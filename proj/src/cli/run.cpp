#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "sfl/cli.hpp"
#include "sfl/dirac.hpp"
#include "sfl/doi.hpp"
#include "sfl/error.hpp"
#include "sfl/flow.hpp"
#include "sfl/scenarios.hpp"
#include "sfl/ssf.hpp"
#include "sfl/transforms.hpp"

namespace sfl::cli {

using nlohmann::json;

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"flow",       "ssf",       "index", "trace-check",
                                                 "pushnitski", "doi-check", "eta",   "chain"};
  return names;
}

RunConfig parse_run_config(const json& doc) {
  if (!doc.is_object()) throw PreconditionError("config: top level must be an object");
  RunConfig cfg;
  cfg.document = doc;
  try {
    cfg.experiment = doc.value("experiment", std::string());
    if (doc.contains("grid")) {
      const json& grid = doc.at("grid");
      cfg.grid_t = grid.value("T", cfg.grid_t);
      cfg.grid_n = grid.value("N", cfg.grid_n);
    }
    if (doc.contains("tolerances")) {
      for (const auto& [key, value] : doc.at("tolerances").items()) cfg.tolerances[key] = value.get<double>();
    }
    if (doc.contains("output")) {
      const json& out = doc.at("output");
      cfg.out_path = out.value("path", cfg.out_path);
      cfg.format = out.value("format", cfg.format);
    }
    cfg.seed = doc.value("seed", cfg.seed);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("config: ") + e.what());
  }
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), cfg.experiment) == names.end()) {
    throw PreconditionError("unknown experiment \"" + cfg.experiment + "\"");
  }
  if (cfg.format != "csv" && cfg.format != "json") {
    throw PreconditionError("unknown output format \"" + cfg.format + "\"");
  }
  if (!(cfg.grid_t > 0.0) || cfg.grid_n < 8) throw PreconditionError("config: grid needs T > 0 and N >= 8");
  return cfg;
}

namespace {

std::string format_cell(const json& cell) {
  if (cell.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", cell.get<double>());
    return buf;
  }
  if (cell.is_boolean()) return cell.get<bool>() ? "true" : "false";
  if (cell.is_string()) return cell.get<std::string>();
  return cell.dump();
}

double tolerance(const RunConfig& cfg, const std::string& key, double fallback) {
  const auto it = cfg.tolerances.find(key);
  return it == cfg.tolerances.end() ? fallback : it->second;
}

json params_of(const RunConfig& cfg) { return cfg.document.value("params", json::object()); }

std::vector<double> number_list(const json& params, const char* key, std::vector<double> fallback) {
  if (!params.contains(key)) return fallback;
  return params.at(key).get<std::vector<double>>();
}

Report run_flow(const RunConfig&, const OperatorPath& path) {
  Report r;
  r.columns = {"spectral_flow", "intervals", "t0", "margin"};
  const FlowResult res = spectral_flow(path);
  r.rows.push_back({res.flow, static_cast<int>(res.certificate.epsilons.size()), res.certificate.t0,
                    res.certificate.margin});
  if (res.certificate.flow() != res.flow) r.failures.push_back("certificate does not reproduce the flow");
  return r;
}

Report run_ssf(const RunConfig&, const OperatorPath& path) {
  Report r;
  r.columns = {"lo", "hi", "value"};
  const SymOp a_plus = asymptote_plus(path);
  const StepFunction xi = xi_counting(a_plus, path.a_minus());
  for (const auto& p : xi.pieces()) r.rows.push_back({p.lo, p.hi, p.value});
  if (!approx_equal(xi, xi_invariance(a_plus, path.a_minus()), 1e-10)) {
    r.failures.push_back("invariance-principle xi differs from counting xi");
  }
  return r;
}

Report run_index(const RunConfig& cfg, const OperatorPath& path) {
  Report r;
  r.columns = {"T", "N", "index", "kernel_h1", "kernel_h2", "threshold", "gap_ratio", "xi0", "pass"};
  const DiracDiscretization dd = build_dirac(path, TimeGrid(cfg.grid_t, cfg.grid_n));
  const IndexResult ix = numeric_index(dd, tolerance(cfg, "index", 1e-6));
  const int xi0 = static_cast<int>(std::lround(xi_counting(dd.a_plus(), dd.a_minus())(0.0)));
  const bool pass = ix.index == xi0;
  r.rows.push_back({cfg.grid_t, cfg.grid_n, ix.index, ix.kernel_h1, ix.kernel_h2, ix.threshold,
                    std::isinf(ix.gap_ratio) ? json(nullptr) : json(ix.gap_ratio), xi0, pass});
  if (!pass) r.failures.push_back("numeric index differs from xi(0)");
  return r;
}

Report run_trace_check(const RunConfig& cfg, const OperatorPath& path) {
  Report r;
  r.columns = {"z_re", "z_im", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual", "pass"};
  const json params = params_of(cfg);
  std::vector<Complex> zs;
  if (params.contains("z")) {
    for (const auto& z : params.at("z")) zs.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  } else {
    zs.emplace_back(-1.0, 0.0);
  }
  const double tol = tolerance(cfg, "trace", 0.05);
  const DiracDiscretization dd = build_dirac(path, TimeGrid(cfg.grid_t, cfg.grid_n));
  for (const Complex& z : zs) {
    const TraceCheck c = trace_formula_residual(dd, z);
    const bool pass = c.residual < tol;
    r.rows.push_back({z.real(), z.imag(), c.lhs.real(), c.lhs.imag(), c.rhs.real(), c.rhs.imag(), c.residual, pass});
    if (!pass) {
      std::ostringstream msg;
      msg << "trace formula residual " << c.residual << " at z = " << z << " exceeds " << tol;
      r.failures.push_back(msg.str());
    }
  }
  return r;
}

Report run_pushnitski(const RunConfig& cfg, const OperatorPath& path) {
  Report r;
  r.columns = {"lambda", "xi_h_abel", "xi_h_discrete", "checked", "pass"};
  const DiracDiscretization dd = build_dirac(path, TimeGrid(cfg.grid_t, cfg.grid_n));
  const StepFunction xi = xi_counting(dd.a_plus(), dd.a_minus());
  const StepFunction xi_h = xi_h_counting(dd);
  const double gap = std::min(dd.a_plus().min_abs_eigenvalue(), dd.a_minus().min_abs_eigenvalue());
  std::vector<double> lambdas;
  for (int k = 1; k <= 40; ++k) lambdas.push_back(0.1 * k);
  lambdas = number_list(params_of(cfg), "lambda", lambdas);
  // Below the continuum threshold gap^2 both sides are integers and must agree.
  for (double l : lambdas) {
    const double abel = abel_forward(xi, l);
    const double disc = xi_h(l);
    const bool checked = l > 0.05 * gap * gap && l < 0.95 * gap * gap;
    const bool pass = !checked || std::abs(abel - disc) < 0.5;
    r.rows.push_back({l, abel, disc, checked, pass});
    if (!pass) {
      std::ostringstream msg;
      msg << "discretized xi_H differs from the Abel transform at lambda = " << l;
      r.failures.push_back(msg.str());
    }
  }
  return r;
}

Report run_doi_check(const RunConfig& cfg, const OperatorPath& path) {
  Report r;
  r.columns = {"sample", "dim", "residual", "pass"};
  const json params = params_of(cfg);
  const int samples = params.value("samples", 25);
  const int dim = params.value("sample_dim", 6);
  const double tol = tolerance(cfg, "doi", 1e-6);
  const DOIQuadrature quad = make_doi_quadrature(params.value("s_max", 8.0), params.value("nodes", 400));
  auto check = [&](int id, const SymOp& ap, const SymOp& am) {
    const double res = g_diff_via_doi(ap, am, quad).residual;
    const bool pass = res < tol;
    r.rows.push_back({id, static_cast<int>(ap.dim()), res, pass});
    if (!pass) {
      std::ostringstream msg;
      msg << "DOI residual " << res << " for sample " << id << " exceeds " << tol;
      r.failures.push_back(msg.str());
    }
  };
  check(0, asymptote_plus(path), path.a_minus());

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  for (int id = 1; id <= samples; ++id) {
    Matrix a(dim, dim);
    Matrix b(dim, dim);
    for (Eigen::Index i = 0; i < dim * dim; ++i) {
      a.data()[i] = normal(rng);
      b.data()[i] = normal(rng);
    }
    a = (0.5 * (a + a.transpose())).eval();
    b = (0.5 * (b + b.transpose())).eval();
    b /= operator_norm(b);  // |A_+ - A_-| = 1
    check(id, eig_sym(a + b), eig_sym(a));
  }
  return r;
}

Report run_eta(const RunConfig& cfg, const OperatorPath& path) {
  Report r;
  r.columns = {"m", "eta_closed", "eta_zeta", "eta_heat", "pass"};
  const json params = params_of(cfg);
  const double s = params.value("s", 1e-3);
  const double t = params.value("t", 1e-3);
  const double tol_zeta = tolerance(cfg, "eta_zeta", 1e-3);
  const double tol_heat = tolerance(cfg, "eta_heat", 5e-2);
  const StepFunction xi = xi_counting(asymptote_plus(path), path.a_minus());
  for (double m : number_list(params, "m", {1.0})) {
    const double closed = eta_closed(xi, m);
    const double zeta = eta_zeta(xi, m, s);
    const double heat = eta_heat(xi, m, t);
    const bool pass = std::abs(zeta - closed) < tol_zeta && std::abs(heat - closed) < tol_heat;
    r.rows.push_back({m, closed, zeta, heat, pass});
    if (!pass) {
      std::ostringstream msg;
      msg << "regularized eta values disagree with the closed form at m = " << m;
      r.failures.push_back(msg.str());
    }
  }
  return r;
}

Report run_chain(const RunConfig& cfg, const OperatorPath& path) {
  Report r;
  r.columns = {"spectral_flow", "pair_index", "morse_trace", "xi0", "xi0_H_median", "det_xi0", "pass"};
  ChainOptions opts;
  opts.dirac_t = cfg.grid_t;
  opts.dirac_n = cfg.grid_n;
  opts.det_eps = params_of(cfg).value("det_eps", opts.det_eps);
  const ChainReport c = morse_chain_report(path, opts);
  r.rows.push_back({c.spectral_flow, c.pair_index, c.morse_trace, c.xi0, c.xi0_h_median, c.det_xi0, c.all_equal});
  if (!c.all_equal) r.failures.push_back("equality chain broken");
  return r;
}

void write_report(const RunConfig& cfg, const Report& report) {
  std::ofstream os(cfg.out_path, std::ios::binary);
  if (!os) throw PreconditionError("cannot open output file " + cfg.out_path);
  os << (cfg.format == "json" ? render_json(report).dump(2) + "\n" : render_csv(report));
  if (!os) throw PreconditionError("failed writing " + cfg.out_path);
}

}  // namespace

std::string render_csv(const Report& report) {
  std::ostringstream os;
  for (std::size_t i = 0; i < report.columns.size(); ++i) os << (i ? "," : "") << report.columns[i];
  os << "\n";
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << "\n";
  }
  return os.str();
}

json render_json(const Report& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < row.size() && i < report.columns.size(); ++i) obj[report.columns[i]] = row[i];
    rows.push_back(std::move(obj));
  }
  return json{{"experiment", report.experiment},
              {"columns", report.columns},
              {"rows", std::move(rows)},
              {"failures", report.failures},
              {"pass", report.failures.empty()}};
}

RunOutcome run(const RunConfig& cfg) {
  RunOutcome out;
  out.report.experiment = cfg.experiment;
  try {
    const OperatorPath path = scenarios::from_config(cfg.document);
    if (static_cast<Eigen::Index>(cfg.grid_n) * path.dim() > kMaxDiracSize) {
      throw PreconditionError("grid N * dim exceeds the size limit " + std::to_string(kMaxDiracSize));
    }
    Report rep;
    if (cfg.experiment == "flow") rep = run_flow(cfg, path);
    else if (cfg.experiment == "ssf") rep = run_ssf(cfg, path);
    else if (cfg.experiment == "index") rep = run_index(cfg, path);
    else if (cfg.experiment == "trace-check") rep = run_trace_check(cfg, path);
    else if (cfg.experiment == "pushnitski") rep = run_pushnitski(cfg, path);
    else if (cfg.experiment == "doi-check") rep = run_doi_check(cfg, path);
    else if (cfg.experiment == "eta") rep = run_eta(cfg, path);
    else if (cfg.experiment == "chain") rep = run_chain(cfg, path);
    else throw PreconditionError("unknown experiment \"" + cfg.experiment + "\"");
    rep.experiment = cfg.experiment;
    out.report = std::move(rep);
    out.exit_code = out.report.failures.empty() ? kPass : kNumericalFailure;
  } catch (const PreconditionError& e) {
    out.exit_code = kUsageError;
    out.message = e.what();
    return out;
  } catch (const json::exception& e) {
    out.exit_code = kUsageError;
    out.message = std::string("config: ") + e.what();
    return out;
  } catch (const std::exception& e) {
    out.exit_code = kNumericalFailure;
    out.message = e.what();
    out.report.failures.push_back(e.what());
  }
  if (!cfg.out_path.empty()) {
    try {
      write_report(cfg, out.report);
    } catch (const std::exception& e) {
      out.exit_code = kUsageError;
      out.message = e.what();
    }
  }
  return out;
}

std::string usage_text() {
  std::ostringstream os;
  os << "usage: sfl --config PATH [--experiment NAME] [--out PATH] [--format csv|json] [--seed U64]\n"
     << "experiments:";
  for (const auto& n : experiment_names()) os << " " << n;
  os << "\nscenarios:";
  for (const auto& n : scenarios::gallery_names()) os << " " << n;
  os << "\nconfig: {\"scenario\": name|{...}, \"experiment\": name, \"grid\": {\"T\": 12, \"N\": 400},\n"
     << "         \"tolerances\": {...}, \"params\": {...}, \"output\": {\"path\": p, \"format\": \"csv\"},\n"
     << "         \"seed\": 0}\n";
  return os.str();
}

}  // namespace sfl::cli
