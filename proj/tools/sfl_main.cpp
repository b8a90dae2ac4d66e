#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sfl/cli.hpp"
#include "sfl/error.hpp"

int main(int argc, char** argv) {
  using sfl::cli::kUsageError;

  CLI::App app{"Spectral flow and spectral shift experiments"};
  std::string config_path;
  std::optional<std::string> experiment;
  std::optional<std::string> out_path;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--experiment", experiment, "Experiment to run (overrides the config)");
  app.add_option("--out", out_path, "Report file (default: standard output)");
  app.add_option("--format", format, "Report format: csv or json");
  app.add_option("--seed", seed, "Seed for randomized sweeps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help() << "\n" << sfl::cli::usage_text();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << sfl::cli::usage_text();
    return kUsageError;
  }

  nlohmann::json doc = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot read " << config_path << "\n";
      return kUsageError;
    }
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "error: " << config_path << ": " << e.what() << "\n";
      return kUsageError;
    }
  }
  if (!doc.is_object()) {
    std::cerr << "error: config must be a JSON object\n" << sfl::cli::usage_text();
    return kUsageError;
  }
  if (experiment) doc["experiment"] = *experiment;
  if (out_path) doc["output"]["path"] = *out_path;
  if (format) doc["output"]["format"] = *format;
  if (seed) doc["seed"] = *seed;

  sfl::cli::RunConfig cfg;
  try {
    cfg = sfl::cli::parse_run_config(doc);
  } catch (const sfl::Error& e) {
    std::cerr << "error: " << e.what() << "\n" << sfl::cli::usage_text();
    return kUsageError;
  }

  const sfl::cli::RunOutcome outcome = sfl::cli::run(cfg);
  if (outcome.exit_code == kUsageError) {
    std::cerr << "error: " << outcome.message << "\n" << sfl::cli::usage_text();
    return kUsageError;
  }
  if (cfg.out_path.empty()) {
    if (cfg.format == "json") {
      std::cout << sfl::cli::render_json(outcome.report).dump(2) << "\n";
    } else {
      std::cout << sfl::cli::render_csv(outcome.report);
    }
  }
  for (const auto& f : outcome.report.failures) std::cerr << "FAILED: " << f << "\n";
  return outcome.exit_code;
}
