#include "trecom/tempering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "trecom/error.hpp"

namespace trecom {

using nlohmann::json;

double swap_log_ratio(double J_i, double J_j, double gamma_i, double gamma_j, double w) {
  return (gamma_i - gamma_j) * w * (J_i - J_j);
}

void LadderConfig::validate() const {
  if (gammas.empty() || gammas.front() != 0.0) throw ValidationError("gamma ladder must start at 0");
  for (std::size_t i = 1; i < gammas.size(); ++i)
    if (!(gammas[i] > gammas[i - 1])) throw ValidationError("gamma ladder must be strictly increasing");
  if (gammas.back() > 1.0) throw ValidationError("gamma ladder must lie in [0, 1]");
  if (!live_base && gammas.size() < 2) throw ValidationError("ladder needs a level above the reservoir");
  if (swap_interval == 0) throw ValidationError("swap interval must be positive");
  if (!(w >= 0.0)) throw ValidationError("compactness weight w must be >= 0");
}

namespace {

double record_energy(const ReservoirRecord& r, const MeasureParams& p) {
  double e = p.w * r.J;
  if (p.interpolate_tree_weight) {
    if (!r.log_tau_sum) throw RuntimeError("reservoir lacks tree counts needed by the interpolating family");
    e += *r.log_tau_sum;
  }
  return e;
}

// Runs `count` steps, buffering states the sink should see.
void advance(RecomChain& chain, Rng& rng, std::uint64_t count, std::uint64_t every, bool keep,
             std::vector<ChainState>& out) {
  for (std::uint64_t s = 0; s < count; ++s) {
    chain.step(rng);
    if (keep && chain.state().step % every == 0) out.push_back(chain.state());
  }
}

// Runs jobs 0..n-1 on up to `workers` threads; job i only touches slot i.
template <class F>
void parallel_for(std::size_t n, int workers, F&& job) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) job(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

bool heat_bath_exchange(RecomChain& lowest, const Reservoir& reservoir, Rng& rng) {
  if (reservoir.records.empty()) throw RuntimeError("heat-bath reservoir is empty");
  const ReservoirRecord& r = reservoir.records[rng.uniform_index(reservoir.records.size())];
  const double log_a = swap_log_ratio(lowest.tempering_energy(), record_energy(r, lowest.params()),
                                      lowest.params().gamma, 0.0, 1.0);
  if (std::log(rng.uniform01()) > log_a) return false;
  lowest.adopt(r.plan, r.forest);
  return true;
}

Ladder::Ladder(const RegionGraph& g, MeasureParams base, LadderConfig config, std::vector<ChainState> initial,
               std::uint64_t seed)
    : g_(&g), base_(base), config_(std::move(config)), coordinator_(Rng::stream(seed, coordinator_stream)) {
  config_.validate();
  base_.w = config_.w;
  const std::size_t first = first_live_rung();
  if (initial.size() != config_.gammas.size() - first)
    throw ValidationError("ladder needs " + std::to_string(config_.gammas.size() - first) +
                          " initial states, got " + std::to_string(initial.size()));
  for (std::size_t r = first; r < config_.gammas.size(); ++r) {
    MeasureParams p = base_;
    p.gamma = config_.gammas[r];
    replicas_.emplace_back(g, p, std::move(initial[r - first]));
    rngs_.push_back(Rng::stream(seed, r - first));
  }
  stats_.attempts.assign(config_.gammas.size() - 1, 0);
  stats_.accepts.assign(config_.gammas.size() - 1, 0);
}

void Ladder::exchange_round(const Reservoir* reservoir) {
  const std::size_t n = config_.gammas.size();
  for (std::size_t i = rounds_ % 2; i + 1 < n; i += 2) {
    ++stats_.attempts[i];
    bool accepted = false;
    if (i == 0 && !config_.live_base) {
      if (!reservoir) throw RuntimeError("heat-bath exchange needs a reservoir");
      accepted = heat_bath_exchange(replica_at_rung(1), *reservoir, coordinator_);
    } else {
      RecomChain& lo = replica_at_rung(i);
      RecomChain& hi = replica_at_rung(i + 1);
      const double log_a = swap_log_ratio(lo.tempering_energy(), hi.tempering_energy(), config_.gammas[i],
                                          config_.gammas[i + 1], 1.0);
      accepted = std::log(coordinator_.uniform01()) <= log_a;
      if (accepted) lo.swap_configuration(hi);
    }
    stats_.accepts[i] += accepted;
  }
  ++rounds_;
}

void Ladder::run(std::uint64_t steps, std::uint64_t subsample_every, const Reservoir* reservoir,
                 const RungSink& sink, bool all_rungs, int workers) {
  if (subsample_every == 0) throw ValidationError("subsample interval must be positive");
  const std::size_t n = replicas_.size();
  std::vector<std::vector<ChainState>> buffers(n);
  while (steps > 0) {
    const std::uint64_t chunk = std::min(steps, config_.swap_interval - local_steps_);
    parallel_for(n, workers, [&](std::size_t i) {
      const bool keep = sink && (all_rungs || i + 1 == n);
      advance(replicas_[i], rngs_[i], chunk, subsample_every, keep, buffers[i]);
    });
    for (std::size_t i = 0; i < n; ++i) {
      for (const ChainState& s : buffers[i]) sink(i + first_live_rung(), s);
      buffers[i].clear();
    }
    steps -= chunk;
    local_steps_ += chunk;
    if (local_steps_ == config_.swap_interval) {
      exchange_round(reservoir);
      local_steps_ = 0;
    }
  }
}

std::string Ladder::serialize_checkpoint() const {
  json j;
  j["rounds"] = rounds_;
  j["local_steps"] = local_steps_;
  j["coordinator_rng"] = coordinator_.serialize();
  j["gammas"] = config_.gammas;
  j["swap_attempts"] = stats_.attempts;
  j["swap_accepts"] = stats_.accepts;
  json reps = json::array();
  for (std::size_t i = 0; i < replicas_.size(); ++i)
    reps.push_back(json::parse(trecom::serialize_checkpoint(*g_, replicas_[i].state(), rngs_[i])));
  j["replicas"] = std::move(reps);
  return j.dump() + "\n";
}

void Ladder::restore_checkpoint(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
    if (j.at("gammas").get<std::vector<double>>() != config_.gammas)
      throw ValidationError("checkpoint was written for a different gamma ladder");
    const auto& reps = j.at("replicas");
    if (reps.size() != replicas_.size()) throw ValidationError("checkpoint replica count differs");
    std::vector<RecomChain> replicas;
    std::vector<Rng> rngs;
    for (std::size_t i = 0; i < reps.size(); ++i) {
      Checkpoint cp = parse_checkpoint(*g_, replicas_[i].params(), reps[i].dump());
      replicas.emplace_back(*g_, replicas_[i].params(), std::move(cp.state));
      rngs.push_back(cp.rng);
    }
    rounds_ = j.at("rounds").get<std::uint64_t>();
    local_steps_ = j.at("local_steps").get<std::uint64_t>();
    coordinator_ = Rng::deserialize(j.at("coordinator_rng").get<std::string>());
    stats_.attempts = j.at("swap_attempts").get<std::vector<std::uint64_t>>();
    stats_.accepts = j.at("swap_accepts").get<std::vector<std::uint64_t>>();
    replicas_ = std::move(replicas);
    rngs_ = std::move(rngs);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed ladder checkpoint: ") + e.what());
  }
}

void Ladder::save_checkpoint(const std::filesystem::path& path) const {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw RuntimeError("cannot write " + tmp.string());
    out << serialize_checkpoint();
  }
  std::filesystem::rename(tmp, path);
}

void Ladder::load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  restore_checkpoint(ss.str());
}

double expected_swap_acceptance(const std::vector<double>& J, double w, double delta_gamma,
                                const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  double sum = 0.0;
  for (const auto& [i, j] : pairs) sum += std::min(1.0, std::exp(delta_gamma * w * (J[i] - J[j])));
  return sum / static_cast<double>(pairs.size());
}

SpacingEstimate estimate_gamma_spacing(const std::vector<double>& J, double w, double target_rate, Rng& rng,
                                       std::size_t max_pairs) {
  if (J.size() < 2) throw ValidationError("gamma spacing needs at least 2 samples");
  if (!(target_rate > 0.0 && target_rate < 1.0)) throw ValidationError("target rate must lie in (0, 1)");
  if (max_pairs == 0) throw ValidationError("max_pairs must be positive");
  const std::size_t n = J.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (n * (n - 1) <= max_pairs) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) pairs.emplace_back(i, j);
  } else {
    while (pairs.size() < max_pairs) {
      const std::size_t i = rng.uniform_index(n), j = rng.uniform_index(n);
      if (i != j) pairs.emplace_back(i, j);
    }
  }
  // As delta grows, each pair's acceptance tends to 1 if J_i >= J_j, else 0.
  std::size_t limit = 0;
  for (const auto& [i, j] : pairs) limit += J[i] >= J[j];
  const double limit_rate = static_cast<double>(limit) / static_cast<double>(pairs.size());
  if (w == 0.0 || limit_rate >= target_rate) return {std::numeric_limits<double>::infinity(), true, limit_rate};

  double lo = 0.0, hi = 1.0;
  while (expected_swap_acceptance(J, w, hi, pairs) >= target_rate) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    (expected_swap_acceptance(J, w, mid, pairs) >= target_rate ? lo : hi) = mid;
  }
  return {lo, false, expected_swap_acceptance(J, w, lo, pairs)};
}

Reservoir reservoir_build(const RegionGraph& g, MeasureParams p, const Plan* initial, const ReservoirSpec& spec,
                          std::uint64_t seed, int workers) {
  if (spec.chains < 1) throw ValidationError("reservoir needs at least one chain");
  if (spec.subsample_every == 0) throw ValidationError("subsample interval must be positive");
  if (!(spec.burn_in_fraction >= 0.0 && spec.burn_in_fraction < 1.0))
    throw ValidationError("burn-in fraction must lie in [0, 1)");
  p.gamma = 0.0;
  const auto burn = static_cast<std::uint64_t>(std::floor(spec.burn_in_fraction * static_cast<double>(spec.steps)));
  std::vector<std::vector<ReservoirRecord>> pooled(spec.chains);
  parallel_for(static_cast<std::size_t>(spec.chains), workers, [&](std::size_t c) {
    Rng rng = Rng::stream(seed, c);
    const Plan start = initial ? *initial : random_initial_plan(g, p, rng);
    RecomChain chain(g, p, make_initial_state(g, start, p, rng));
    for (std::uint64_t s = 0; s < spec.steps; ++s) {
      chain.step(rng);
      const ChainState& st = chain.state();
      if (st.step <= burn || st.step % spec.subsample_every != 0) continue;
      ReservoirRecord rec{st.plan, st.forest, st.cached.J, std::nullopt};
      if (p.interpolate_tree_weight) {
        double sum = 0.0;
        for (double t : st.cached.log_tau) sum += t;
        rec.log_tau_sum = sum;
      }
      pooled[c].push_back(std::move(rec));
    }
  });
  Reservoir out;
  for (auto& chain_records : pooled)
    for (auto& r : chain_records) out.records.push_back(std::move(r));
  return out;
}

void save_reservoir(const Reservoir& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot write " + path.string());
  for (const ReservoirRecord& rec : r.records) {
    json j;
    j["J"] = rec.J;
    if (rec.log_tau_sum) j["log_tau_sum"] = *rec.log_tau_sum;
    j["num_districts"] = rec.plan.num_districts;
    j["assignment"] = rec.plan.assignment;
    j["forest"] = rec.forest.trees;
    out << j.dump() << '\n';
  }
  if (!out) throw RuntimeError("failed writing " + path.string());
}

Reservoir load_reservoir(const RegionGraph& g, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot read " + path.string());
  Reservoir r;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    try {
      const json j = json::parse(line);
      ReservoirRecord rec;
      rec.J = j.at("J").get<double>();
      if (j.contains("log_tau_sum")) rec.log_tau_sum = j["log_tau_sum"].get<double>();
      rec.plan.num_districts = j.at("num_districts").get<int>();
      rec.plan.assignment = j.at("assignment").get<std::vector<DistrictIndex>>();
      rec.forest.trees = j.at("forest").get<std::vector<Tree>>();
      validate_plan(g, rec.plan);
      if (rec.forest.trees.size() != static_cast<std::size_t>(rec.plan.num_districts))
        throw ParseError(where + ": forest does not have one tree per district");
      for (const Tree& t : rec.forest.trees)
        for (EdgeIndex e : t)
          if (e < 0 || static_cast<std::size_t>(e) >= g.num_edges())
            throw ParseError(where + ": edge index out of range");
      r.records.push_back(std::move(rec));
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return r;
}

}  // namespace trecom
