#include "trecom/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trecom/error.hpp"

namespace trecom {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<double> RunConfig::default_gammas() {
  std::vector<double> g;
  for (int i = 1; i <= 11; ++i) g.push_back((i - 1) / 10.0);
  return g;
}

MeasureParams RunConfig::measure(double gamma) const {
  MeasureParams p;
  p.gamma = gamma;
  p.w = w;
  p.pop_tolerance = pop_tolerance;
  p.max_county_splits = max_county_splits;
  p.num_districts = num_districts;
  p.interpolate_tree_weight = interpolate_tree_weight;
  return p;
}

LadderConfig RunConfig::ladder() const {
  LadderConfig l;
  l.gammas = gammas;
  l.w = w;
  l.swap_interval = swap_interval;
  l.live_base = live_base;
  return l;
}

void RunConfig::validate() const {
  measure(sample_gamma).validate();
  ladder().validate();
  if (subsample_every == 0) throw ValidationError("subsample_every must be positive");
  if (checkpoint_every == 0) throw ValidationError("checkpoint_every must be positive");
  if (workers < 1) throw ValidationError("workers must be >= 1");
  if (reservoir.chains < 1) throw ValidationError("reservoir.chains must be >= 1");
  if (reservoir.subsample_every == 0) throw ValidationError("reservoir.subsample_every must be positive");
  if (!(reservoir.burn_in_fraction >= 0.0 && reservoir.burn_in_fraction < 1.0))
    throw ValidationError("reservoir.burn_in_fraction must lie in [0, 1)");
  analysis.vra.validate();
}

namespace {

const std::set<std::string> kTopKeys = {
    "graph", "initial_plan", "reference_plan", "out", "num_districts", "pop_tolerance", "max_county_splits", "w",
    "gammas", "sample_gamma", "steps", "subsample_every", "swap_interval", "checkpoint_every", "seed", "live_base",
    "interpolate_tree_weight", "emit_all_rungs", "reservoir", "elections", "analysis", "workers"};
const std::set<std::string> kReservoirKeys = {"chains", "steps", "subsample_every", "burn_in_fraction", "path"};
const std::set<std::string> kAnalysisKeys = {
    "swing_lo", "swing_hi", "swing_step", "swing_window", "swing_elections", "low_ranks", "high_ranks",
    "top_democratic", "most_republican", "convergence_threshold", "vra", "vra_scope_districts"};
const std::set<std::string> kVraKeys = {"c", "required_districts", "min_passing_elections", "bvap_floor",
                                        "black_candidate"};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ValidationError("unknown config key \"" + where + key + "\"");
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  try {
    check_keys(j, kTopKeys, "");
    if (j.contains("graph")) c.graph = resolve(base_dir, j["graph"].get<std::string>());
    if (j.contains("initial_plan")) c.initial_plan = resolve(base_dir, j["initial_plan"].get<std::string>());
    if (j.contains("reference_plan")) c.reference_plan = resolve(base_dir, j["reference_plan"].get<std::string>());
    if (j.contains("out")) c.out = resolve(base_dir, j["out"].get<std::string>());
    read(j, "num_districts", c.num_districts);
    read(j, "pop_tolerance", c.pop_tolerance);
    read(j, "max_county_splits", c.max_county_splits);
    read(j, "w", c.w);
    read(j, "gammas", c.gammas);
    read(j, "sample_gamma", c.sample_gamma);
    read(j, "steps", c.steps);
    read(j, "subsample_every", c.subsample_every);
    read(j, "swap_interval", c.swap_interval);
    read(j, "checkpoint_every", c.checkpoint_every);
    read(j, "seed", c.seed);
    read(j, "live_base", c.live_base);
    read(j, "interpolate_tree_weight", c.interpolate_tree_weight);
    read(j, "emit_all_rungs", c.emit_all_rungs);
    read(j, "elections", c.elections);
    read(j, "workers", c.workers);
    if (j.contains("reservoir")) {
      const json& r = j["reservoir"];
      check_keys(r, kReservoirKeys, "reservoir.");
      read(r, "chains", c.reservoir.chains);
      read(r, "steps", c.reservoir.steps);
      read(r, "subsample_every", c.reservoir.subsample_every);
      read(r, "burn_in_fraction", c.reservoir.burn_in_fraction);
      if (r.contains("path")) c.reservoir_path = r["path"].get<std::string>();
    }
    if (j.contains("analysis")) {
      const json& a = j["analysis"];
      AnalysisConfig& ac = c.analysis;
      check_keys(a, kAnalysisKeys, "analysis.");
      read(a, "swing_lo", ac.swing_lo);
      read(a, "swing_hi", ac.swing_hi);
      read(a, "swing_step", ac.swing_step);
      if (a.contains("swing_window")) {
        const auto win = a["swing_window"].get<std::vector<double>>();
        if (win.size() != 2) throw ValidationError("analysis.swing_window must be [lo, hi]");
        ac.swing_window = std::make_pair(win[0], win[1]);
      }
      read(a, "swing_elections", ac.swing_elections);
      read(a, "low_ranks", ac.low_ranks);
      read(a, "high_ranks", ac.high_ranks);
      read(a, "top_democratic", ac.top_democratic);
      read(a, "most_republican", ac.most_republican);
      read(a, "convergence_threshold", ac.convergence_threshold);
      read(a, "vra_scope_districts", ac.vra_scope_districts);
      if (a.contains("vra")) {
        const json& v = a["vra"];
        check_keys(v, kVraKeys, "analysis.vra.");
        read(v, "c", ac.vra.c);
        read(v, "required_districts", ac.vra.required_districts);
        read(v, "min_passing_elections", ac.vra.min_passing_elections);
        if (v.contains("bvap_floor") && !v["bvap_floor"].is_null()) ac.vra.bvap_floor = v["bvap_floor"].get<double>();
        read(v, "black_candidate", ac.vra.black_candidate);
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string canonical_config(const RunConfig& c) {
  ordered_json j;
  j["graph"] = c.graph.filename().string();
  j["initial_plan"] = c.initial_plan ? c.initial_plan->filename().string() : "";
  j["num_districts"] = c.num_districts;
  j["pop_tolerance"] = c.pop_tolerance;
  j["max_county_splits"] = c.max_county_splits;
  j["w"] = c.w;
  j["gammas"] = c.gammas;
  j["sample_gamma"] = c.sample_gamma;
  j["subsample_every"] = c.subsample_every;
  j["swap_interval"] = c.swap_interval;
  j["seed"] = c.seed;
  j["live_base"] = c.live_base;
  j["interpolate_tree_weight"] = c.interpolate_tree_weight;
  j["emit_all_rungs"] = c.emit_all_rungs;
  j["reservoir"] = {{"chains", c.reservoir.chains},
                    {"steps", c.reservoir.steps},
                    {"subsample_every", c.reservoir.subsample_every},
                    {"burn_in_fraction", c.reservoir.burn_in_fraction}};
  j["elections"] = c.elections;
  return j.dump();
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const RunConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_config(c))));
  return buf;
}

}  // namespace trecom
