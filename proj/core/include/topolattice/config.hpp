#pragma once

#include <optional>
#include <string>
#include <vector>

#include "topolattice/lattice.hpp"
#include "topolattice/magnon.hpp"
#include "topolattice/scattering.hpp"

namespace topolattice {

enum class Task {
  spectrum,
  winding,
  ep_scan,
  threshold_scaling,
  map,
  absorptivity,
  fit,
};

const char* to_string(Task t);
std::optional<Task> task_from_string(const std::string& name);

// Inclusive uniform grid; count == 1 pins min == max.
struct Range {
  double min = 0.0;
  double max = 0.0;
  int count = 0;

  std::vector<double> points() const;
};

// One declarative experiment: which task to run, on which system, over which
// grids. Sections a task does not consume must be absent.
struct ExperimentConfig {
  Task task = Task::spectrum;
  LatticeSpec lattice;
  std::optional<MagnonSpec> magnon;
  std::optional<PortConfig> ports;
  std::optional<Range> currents_a;
  std::optional<Range> omegas_ghz;
  std::optional<Range> delta_gammas_mhz;
  std::vector<int> n_values;
  std::string output_prefix = "artifact";

  // Round-trips through parse_config unchanged.
  std::string to_json() const;
};

struct ParseOutcome {
  std::optional<ExperimentConfig> config;  // set iff errors is empty
  std::vector<std::string> errors;         // every violation, not just the first
};

ParseOutcome parse_config(const std::string& text);

// Shipped per-figure configurations.
std::vector<std::string> preset_names();
std::string preset(const std::string& name);  // throws std::out_of_range

}  // namespace topolattice
