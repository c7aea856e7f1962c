#include "trecom/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trecom/chain.hpp"
#include "trecom/ensemble.hpp"
#include "trecom/error.hpp"
#include "trecom/report.hpp"
#include "trecom/tempering.hpp"

namespace trecom {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Stream indices for initial-state randomness, disjoint from replica streams.
constexpr std::uint64_t kInitialPlanStream = 1000;
constexpr std::uint64_t kInitialForestStream = 2000;

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw RuntimeError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& p, const std::string& text) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw RuntimeError("cannot write " + tmp.string());
    out << text;
    if (!out) throw RuntimeError("failed writing " + tmp.string());
  }
  fs::rename(tmp, p);
}

RegionGraph load_run_graph(const RunConfig& cfg) {
  if (cfg.graph.empty()) throw ValidationError("config does not name a graph");
  RegionGraph g = load_graph(cfg.graph);
  for (const std::string& id : cfg.elections) g.election_index(id);
  return g;
}

ChainState initial_state(const RegionGraph& g, const RunConfig& cfg, const MeasureParams& p, std::uint64_t index) {
  Rng plan_rng = Rng::stream(cfg.seed, kInitialPlanStream + index);
  Rng forest_rng = Rng::stream(cfg.seed, kInitialForestStream + index);
  const Plan plan = cfg.initial_plan ? load_plan(g, *cfg.initial_plan) : random_initial_plan(g, p, plan_rng);
  return make_initial_state(g, plan, p, forest_rng);
}

EnsembleHeader header_for(const RegionGraph& g, const RunConfig& cfg) {
  EnsembleHeader h;
  h.elections = g.elections();
  for (const Unit& u : g.units()) h.unit_ids.push_back(u.id);
  h.num_districts = cfg.num_districts;
  h.config_hash = config_hash(cfg);
  return h;
}

void write_run_info(const RunConfig& cfg, const std::string& command) {
  ordered_json j;
  j["command"] = command;
  j["config_hash"] = config_hash(cfg);
  j["config"] = json::parse(canonical_config(cfg));
  j["steps"] = cfg.steps;
  write_file_atomic(cfg.out / "run.json", j.dump(1) + "\n");
}

struct ResumeInfo {
  std::uint64_t emitted = 0;
  json payload;
};

ResumeInfo read_resume(const RunConfig& cfg, const fs::path& path, const char* key) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("malformed checkpoint " + path.string() + ": " + e.what());
  }
  if (j.value("config_hash", "") != config_hash(cfg))
    throw ValidationError("checkpoint " + path.string() + " was written with a different config");
  return {j.at("emitted").get<std::uint64_t>(), j.at(key)};
}

void write_resume(const RunConfig& cfg, const fs::path& path, std::uint64_t emitted, const char* key,
                  const json& payload) {
  ordered_json j;
  j["config_hash"] = config_hash(cfg);
  j["emitted"] = emitted;
  j[key] = payload;
  write_file_atomic(path, j.dump() + "\n");
}

}  // namespace

void cmd_preprocess(const fs::path& input, const fs::path& output, const fs::path& report,
                    const MergeOptions& options) {
  const RegionGraph raw = load_graph(input, GraphCheck{false});
  const MergeResult merged = merge_multipolygon_units(raw, options);
  save_graph(merged.graph, output);
  ordered_json j = ordered_json::array();
  for (const MergeDecision& d : merged.report)
    j.push_back({{"group", d.group}, {"action", d.action}, {"members", d.members}, {"population", d.population}});
  write_file_atomic(report, j.dump(1) + "\n");
}

std::size_t cmd_reservoir(const RunConfig& cfg, std::ostream& log) {
  const RegionGraph g = load_run_graph(cfg);
  fs::create_directories(cfg.out);
  MeasureParams p = cfg.measure(0.0);
  std::optional<Plan> initial;
  if (cfg.initial_plan) initial = load_plan(g, *cfg.initial_plan);
  const Reservoir r = reservoir_build(g, p, initial ? &*initial : nullptr, cfg.reservoir, cfg.seed, cfg.workers);
  save_reservoir(r, cfg.out / cfg.reservoir_path);
  write_run_info(cfg, "reservoir");
  log << "reservoir: " << r.records.size() << " records -> " << (cfg.out / cfg.reservoir_path).string() << '\n';
  return r.records.size();
}

std::size_t cmd_temper(const RunConfig& cfg, bool resume, std::ostream& log) {
  const RegionGraph g = load_run_graph(cfg);
  fs::create_directories(cfg.out);
  const LadderConfig lc = cfg.ladder();
  const MeasureParams base = cfg.measure(0.0);
  std::optional<Reservoir> reservoir;
  if (!lc.live_base) reservoir = load_reservoir(g, cfg.out / cfg.reservoir_path);

  const std::size_t first = lc.live_base ? 0 : 1;
  std::vector<ChainState> init;
  for (std::size_t r = first; r < lc.gammas.size(); ++r) {
    MeasureParams p = base;
    p.gamma = lc.gammas[r];
    init.push_back(initial_state(g, cfg, p, r - first));
  }
  Ladder ladder(g, base, lc, std::move(init), cfg.seed);

  const fs::path ens_path = cfg.out / "ensemble.jsonl";
  const fs::path cp_path = cfg.out / "checkpoint.json";
  std::uint64_t emitted = 0;
  if (resume) {
    const ResumeInfo info = read_resume(cfg, cp_path, "ladder");
    ladder.restore_checkpoint(info.payload.dump());
    emitted = info.emitted;
    truncate_ensemble(ens_path, emitted);
  }
  EnsembleWriter writer(ens_path, header_for(g, cfg), resume);
  write_run_info(cfg, "temper");

  const RungSink sink = [&](std::size_t rung, const ChainState& s) {
    writer.write(make_record(g, s.plan, s.cached, emitted++, s.step, static_cast<int>(rung)));
  };
  std::uint64_t done = ladder.replicas().front().state().step;
  while (done < cfg.steps) {
    const std::uint64_t chunk = std::min(cfg.checkpoint_every, cfg.steps - done);
    ladder.run(chunk, cfg.subsample_every, reservoir ? &*reservoir : nullptr, sink, cfg.emit_all_rungs, cfg.workers);
    done += chunk;
    writer.flush();
    write_resume(cfg, cp_path, emitted, "ladder", json::parse(ladder.serialize_checkpoint()));
  }
  writer.flush();

  std::ofstream stats(cfg.out / "swap_stats.csv");
  stats << "rung_low,rung_high,gamma_low,gamma_high,attempts,accepts,rate\n";
  for (std::size_t i = 0; i + 1 < lc.gammas.size(); ++i)
    stats << i << ',' << i + 1 << ',' << lc.gammas[i] << ',' << lc.gammas[i + 1] << ',' << ladder.stats().attempts[i]
          << ',' << ladder.stats().accepts[i] << ',' << ladder.stats().rate(i) << '\n';
  log << "temper: " << emitted << " records -> " << ens_path.string() << '\n';
  return emitted;
}

std::size_t cmd_sample(const RunConfig& cfg, bool resume, std::ostream& log) {
  const RegionGraph g = load_run_graph(cfg);
  fs::create_directories(cfg.out);
  const MeasureParams p = cfg.measure(cfg.sample_gamma);
  const fs::path ens_path = cfg.out / "ensemble.jsonl";
  const fs::path cp_path = cfg.out / "checkpoint.json";

  std::optional<RecomChain> chain;
  Rng rng = Rng::stream(cfg.seed, 0);
  std::uint64_t emitted = 0;
  if (resume) {
    const ResumeInfo info = read_resume(cfg, cp_path, "chain");
    Checkpoint cp = parse_checkpoint(g, p, info.payload.dump());
    chain.emplace(g, p, std::move(cp.state));
    rng = cp.rng;
    emitted = info.emitted;
    truncate_ensemble(ens_path, emitted);
  } else {
    chain.emplace(g, p, initial_state(g, cfg, p, 0));
  }
  EnsembleWriter writer(ens_path, header_for(g, cfg), resume);
  write_run_info(cfg, "sample");

  const StateSink sink = [&](const ChainState& s) {
    writer.write(make_record(g, s.plan, s.cached, emitted++, s.step));
  };
  while (chain->state().step < cfg.steps) {
    const std::uint64_t chunk = std::min(cfg.checkpoint_every, cfg.steps - chain->state().step);
    run_chain(*chain, chunk, cfg.subsample_every, rng, sink);
    writer.flush();
    write_resume(cfg, cp_path, emitted, "chain", json::parse(serialize_checkpoint(g, chain->state(), rng)));
  }
  writer.flush();
  log << "sample: " << emitted << " records -> " << ens_path.string() << '\n';
  return emitted;
}

void cmd_analyze(const RunConfig& cfg, const fs::path& ensemble, const std::vector<fs::path>& compare,
                 const fs::path& tables_out, std::ostream& log) {
  const RegionGraph g = load_run_graph(cfg);
  const Ensemble ens = read_ensemble(ensemble);
  std::vector<Ensemble> streams;
  for (const fs::path& p : compare) streams.push_back(read_ensemble(p));
  std::optional<Plan> reference;
  if (cfg.reference_plan) reference = load_plan(g, *cfg.reference_plan);
  const auto entries = write_analysis(g, cfg, ens, streams, reference ? &*reference : nullptr, tables_out);
  log << "analyze: " << entries.size() << " tables -> " << tables_out.string() << '\n';
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tempered ReCom ensemble sampler"};
  app.require_subcommand(1);

  std::string pre_in, pre_out, pre_report;
  MergeOptions merge;
  auto* pre = app.add_subcommand("preprocess", "merge multi-polygon units and write a cleaned graph");
  pre->add_option("input", pre_in, "raw graph JSON")->required();
  pre->add_option("output", pre_out, "cleaned graph JSON")->required();
  pre->add_option("--report", pre_report, "merge report path (default: <output>.merge_report.json)");
  pre->add_option("--pop-cap", merge.pop_cap, "largest population a merged unit may reach");
  pre->add_flag("--absorb-isolated", merge.absorb_county_isolated,
                "absorb components stranded in another county into their longest-boundary neighbour");

  struct Common {
    std::string config;
    std::optional<std::uint64_t> steps, seed, swap_interval, subsample;
    std::optional<int> gamma_levels, max_splits, workers;
    std::optional<double> w, tolerance;
    std::optional<std::string> out;
    bool resume = false;
  };
  Common c;
  auto add_common = [&](CLI::App* cmd, bool resumable) {
    cmd->add_option("--config", c.config, "run config JSON")->required();
    cmd->add_option("--steps", c.steps, "total MH steps per chain");
    cmd->add_option("--gamma-levels", c.gamma_levels, "number of evenly spaced gamma levels in [0, 1]");
    cmd->add_option("--w", c.w, "compactness weight");
    cmd->add_option("--tolerance", c.tolerance, "population tolerance");
    cmd->add_option("--max-splits", c.max_splits, "maximum split counties");
    cmd->add_option("--seed", c.seed, "base seed");
    cmd->add_option("--swap-interval", c.swap_interval, "local steps between exchange rounds");
    cmd->add_option("--subsample", c.subsample, "emit every n-th state");
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--workers", c.workers, "worker threads (results do not depend on it)");
    if (resumable) cmd->add_flag("--resume", c.resume, "continue from the checkpoint in the output directory");
  };
  auto* res = app.add_subcommand("reservoir", "sample the gamma = 0 heat-bath reservoir");
  add_common(res, false);
  auto* tmp = app.add_subcommand("temper", "parallel-tempered run over the gamma ladder");
  add_common(tmp, true);
  auto* smp = app.add_subcommand("sample", "single chain at sample_gamma");
  add_common(smp, true);
  auto* ana = app.add_subcommand("analyze", "ensemble statistics, tables and plot manifest");
  add_common(ana, false);
  std::string ana_ensemble, ana_tables;
  std::vector<std::string> ana_compare;
  ana->add_option("--ensemble", ana_ensemble, "ensemble file (default: <out>/ensemble.jsonl)");
  ana->add_option("--compare", ana_compare, "further ensembles for the convergence table");
  ana->add_option("--tables", ana_tables, "table directory (default: <out>/analysis)");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*pre) {
      const fs::path report = pre_report.empty() ? fs::path(pre_out + ".merge_report.json") : fs::path(pre_report);
      cmd_preprocess(pre_in, pre_out, report, merge);
      out << "preprocess: wrote " << pre_out << " and " << report.string() << '\n';
      return kExitOk;
    }
    RunConfig cfg = load_config(c.config);
    // The reservoir command's step and subsample flags refer to its own chains.
    if (c.steps) (*res ? cfg.reservoir.steps : cfg.steps) = *c.steps;
    if (c.gamma_levels) {
      if (*c.gamma_levels < 2) throw ValidationError("--gamma-levels must be >= 2");
      cfg.gammas.clear();
      for (int i = 0; i < *c.gamma_levels; ++i) cfg.gammas.push_back(static_cast<double>(i) / (*c.gamma_levels - 1));
    }
    if (c.w) cfg.w = *c.w;
    if (c.tolerance) cfg.pop_tolerance = *c.tolerance;
    if (c.max_splits) cfg.max_county_splits = *c.max_splits;
    if (c.seed) cfg.seed = *c.seed;
    if (c.swap_interval) cfg.swap_interval = *c.swap_interval;
    if (c.subsample) (*res ? cfg.reservoir.subsample_every : cfg.subsample_every) = *c.subsample;
    if (c.out) cfg.out = *c.out;
    if (c.workers) cfg.workers = *c.workers;
    cfg.validate();

    if (*res) cmd_reservoir(cfg, out);
    if (*tmp) cmd_temper(cfg, c.resume, out);
    if (*smp) cmd_sample(cfg, c.resume, out);
    if (*ana) {
      std::vector<fs::path> compare(ana_compare.begin(), ana_compare.end());
      cmd_analyze(cfg, ana_ensemble.empty() ? cfg.out / "ensemble.jsonl" : fs::path(ana_ensemble), compare,
                  ana_tables.empty() ? cfg.out / "analysis" : fs::path(ana_tables), out);
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace trecom
