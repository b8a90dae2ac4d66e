#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace sfl::cli {

/// Experiments understood by run().
const std::vector<std::string>& experiment_names();

/// One scenario run. `document` is the full JSON config; the scenario fields
/// ("scenario", "params", "dim", "support_hint") are read from it.
struct RunConfig {
  nlohmann::json document = nlohmann::json::object();
  std::string experiment;
  double grid_t = 12.0;
  int grid_n = 400;
  std::map<std::string, double> tolerances;
  std::string out_path;  // empty: standard output
  std::string format = "csv";
  std::uint64_t seed = 0;
};

/// Reads a RunConfig from a JSON document:
///   { "scenario": ..., "experiment": name, "grid": {"T": t, "N": n},
///     "tolerances": {...}, "params": {...},
///     "output": {"path": p, "format": "csv" | "json"}, "seed": u64 }
/// Throws PreconditionError on malformed input or an unknown experiment.
RunConfig parse_run_config(const nlohmann::json& doc);

/// Tabular report; cells are JSON scalars so CSV and JSON share the values.
struct Report {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
  /// Named checks that failed; empty when everything passed.
  std::vector<std::string> failures;
};

/// Header line plus one line per row; doubles printed with %.17g.
std::string render_csv(const Report& report);
nlohmann::json render_json(const Report& report);

enum ExitCode : int { kPass = 0, kNumericalFailure = 1, kUsageError = 2 };

struct RunOutcome {
  int exit_code = kPass;
  Report report;
  /// Set for usage/config errors and numerical exceptions.
  std::string message;
};

/// Executes the experiment and, when out_path is set, writes the report in
/// the requested format. Never throws.
RunOutcome run(const RunConfig& config);

/// Text listing the flags, experiments and config layout.
std::string usage_text();

}  // namespace sfl::cli
