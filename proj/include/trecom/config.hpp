#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trecom/analysis.hpp"
#include "trecom/measures.hpp"
#include "trecom/tempering.hpp"

namespace trecom {

struct AnalysisConfig {
  double swing_lo = 0.40;
  double swing_hi = 0.60;
  double swing_step = 0.005;
  std::optional<std::pair<double, double>> swing_window;  // statewide window for the tail fraction
  std::vector<std::string> swing_elections;  // empty: every election
  std::vector<int> low_ranks = {5, 6, 7, 8, 9};
  std::vector<int> high_ranks = {10, 11, 12};
  int top_democratic = 3;
  int most_republican = 1;
  double convergence_threshold = 0.02;
  VraModel vra;
  std::vector<std::string> vra_scope_districts;  // reference-plan district labels; empty: statewide
};

// Every knob of a run. Paths are resolved relative to the config file.
struct RunConfig {
  std::filesystem::path graph;
  std::optional<std::filesystem::path> initial_plan;
  std::optional<std::filesystem::path> reference_plan;
  std::filesystem::path out = "out";

  int num_districts = 14;
  double pop_tolerance = 0.01;
  int max_county_splits = 21;
  double w = 0.04;
  std::vector<double> gammas = default_gammas();
  double sample_gamma = 0.0;  // level used by the single-chain `sample` command
  std::uint64_t steps = 10'000'000;
  std::uint64_t subsample_every = 25;
  std::uint64_t swap_interval = 50;
  std::uint64_t checkpoint_every = 100'000;
  std::uint64_t seed = 20211122;
  bool live_base = false;
  bool interpolate_tree_weight = false;
  bool emit_all_rungs = false;
  ReservoirSpec reservoir;
  std::filesystem::path reservoir_path = "reservoir.jsonl";  // relative to out
  std::vector<std::string> elections;  // empty: every election in the graph
  AnalysisConfig analysis;
  int workers = 1;  // never affects results

  static std::vector<double> default_gammas();

  MeasureParams measure(double gamma) const;
  LadderConfig ladder() const;
  void validate() const;
};

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
// Canonical JSON of every result-affecting field (workers and out excluded).
std::string canonical_config(const RunConfig& c);
// 64-bit FNV-1a of canonical_config, as 16 hex digits.
std::string config_hash(const RunConfig& c);
std::uint64_t fnv1a64(const std::string& s);

}  // namespace trecom
