#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "trecom/config.hpp"
#include "trecom/ensemble.hpp"

namespace trecom {

struct ManifestEntry {
  std::string path;  // relative to the output directory
  std::string kind;
  std::string election;  // empty when not election specific
};

// Writes every analysis table for `ensemble` into out_dir plus manifest.json
// listing them. `streams` (possibly empty) are compared for convergence; with
// none, the two halves of `ensemble` are compared. Returns the manifest.
std::vector<ManifestEntry> write_analysis(const RegionGraph& g, const RunConfig& cfg, const Ensemble& ensemble,
                                          const std::vector<Ensemble>& streams, const Plan* reference,
                                          const std::filesystem::path& out_dir);

}  // namespace trecom
