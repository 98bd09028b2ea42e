#pragma once

#include <string>
#include <vector>

#include "topolattice/config.hpp"

namespace topolattice {

struct ArtifactInfo {
  std::string path;
  long rows = 0;  // data rows for CSV, primary records for JSON
  std::string summary;
};

// Executes the configured task and writes its artifacts under out_dir
// (created if needed), named <output_prefix>_<artifact>.<ext>. Everything is
// computed before the first byte is written, and already-written files are
// removed if a later write fails, so failures leave no partial artifact set.
std::vector<ArtifactInfo> run(const ExperimentConfig& config,
                              const std::string& out_dir);

}  // namespace topolattice
