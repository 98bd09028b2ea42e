// Command-line front end: parse an experiment config, dispatch to the
// library, and report the written artifacts. Exit codes: 0 success,
// 1 runtime failure, 2 invalid input. Failures additionally emit a JSON
// error report on stdout so callers can parse them.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "topolattice/config.hpp"
#include "topolattice/parallel.hpp"
#include "topolattice/runner.hpp"

namespace {

int fail(int code, const std::string& stage, const std::vector<std::string>& details) {
  nlohmann::json report;
  report["error"] = stage;
  report["details"] = details;
  std::cout << report.dump(2) << "\n";
  for (const auto& d : details) std::cerr << "error: " << d << "\n";
  return code;
}

bool read_file(const std::string& path, std::string& out, std::string& error) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    error = "cannot read '" + path + "'";
    return false;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  out = buffer.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimerized-lattice spectra, topology scans and port response"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  CLI::App* cmd_run = app.add_subcommand("run", "Execute a config and write artifacts");
  cmd_run->add_option("config", config_path, "JSON experiment config")->required();
  cmd_run->add_option("--out", out_dir, "Output directory (default: current)");
  cmd_run->add_option("--threads", threads,
                      "Worker threads (default: TOPOLATTICE_THREADS, then all cores)");

  std::string validate_path;
  CLI::App* cmd_validate =
      app.add_subcommand("validate", "Check a config and report every problem");
  cmd_validate->add_option("config", validate_path, "JSON experiment config")
      ->required();

  std::string preset_name;
  CLI::App* cmd_preset =
      app.add_subcommand("preset", "Print a shipped per-figure config");
  cmd_preset->add_option("name", preset_name, "Preset name")->required();

  CLI11_PARSE(app, argc, argv);

  if (cmd_preset->parsed()) {
    try {
      std::cout << topolattice::preset(preset_name) << "\n";
    } catch (const std::out_of_range&) {
      std::string names;
      for (const auto& n : topolattice::preset_names()) {
        names += names.empty() ? n : ", " + n;
      }
      return fail(2, "unknown preset",
                  {"unknown preset '" + preset_name + "' (available: " + names + ")"});
    }
    return 0;
  }

  const std::string& path = cmd_run->parsed() ? config_path : validate_path;
  std::string text, io_error;
  if (!read_file(path, text, io_error)) {
    return fail(2, "config not readable", {io_error});
  }
  topolattice::ParseOutcome outcome = topolattice::parse_config(text);
  if (!outcome.config) {
    return fail(2, "invalid config", outcome.errors);
  }

  if (cmd_validate->parsed()) {
    std::cout << "ok: task=" << topolattice::to_string(outcome.config->task)
              << "\n";
    return 0;
  }

  topolattice::set_thread_budget(topolattice::resolve_thread_count(threads));
  try {
    const auto artifacts = topolattice::run(*outcome.config, out_dir);
    for (const auto& a : artifacts) {
      std::cout << "wrote " << a.path << " (" << a.rows << " rows): " << a.summary
                << "\n";
    }
  } catch (const std::exception& e) {
    return fail(1, "run failed", {e.what()});
  }
  return 0;
}
