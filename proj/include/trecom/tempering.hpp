#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "trecom/chain.hpp"

namespace trecom {

// (gamma_i - gamma_j) w (J_i - J_j): log acceptance of exchanging the states
// held at levels i and j.
double swap_log_ratio(double J_i, double J_j, double gamma_i, double gamma_j, double w);

struct ReservoirRecord {
  Plan plan;
  SpanningForest forest;
  double J = 0.0;
  // Sum of log tau_hier; only recorded for the interpolating family.
  std::optional<double> log_tau_sum;
};

// Pre-sampled gamma = 0 states used as an i.i.d. base rung.
struct Reservoir {
  std::vector<ReservoirRecord> records;
};

struct SwapStats {
  // Index i covers the exchange between rung i and rung i + 1.
  std::vector<std::uint64_t> attempts;
  std::vector<std::uint64_t> accepts;

  double rate(std::size_t i) const {
    return attempts[i] ? static_cast<double>(accepts[i]) / static_cast<double>(attempts[i]) : 0.0;
  }
};

struct LadderConfig {
  std::vector<double> gammas;  // strictly increasing, gammas[0] == 0
  double w = 0.04;
  std::uint64_t swap_interval = 50;
  // Run a live chain at gamma = 0 instead of drawing from the reservoir.
  bool live_base = false;

  void validate() const;
};

// Metropolis exchange of the lowest live replica with a uniform reservoir
// record. On acceptance the replica adopts the record and its state is
// dropped. Returns whether the exchange was accepted.
bool heat_bath_exchange(RecomChain& lowest, const Reservoir& reservoir, Rng& rng);

// Sink receives (rung index, state). Rung 0 is the gamma = 0 level.
using RungSink = std::function<void(std::size_t, const ChainState&)>;

class Ladder {
 public:
  // `initial` holds one state per live rung, lowest first: gammas[1..] or,
  // with live_base, gammas[0..]. Replica r draws from Rng::stream(seed, r);
  // exchanges use Rng::stream(seed, coordinator_stream).
  Ladder(const RegionGraph& g, MeasureParams base, LadderConfig config, std::vector<ChainState> initial,
         std::uint64_t seed);

  static constexpr std::uint64_t coordinator_stream = 0xC00D;

  // Advance every replica by `steps` local MH steps, with an exchange round
  // after each full swap_interval. States whose step counter is a multiple
  // of subsample_every are passed to `sink`: every rung when all_rungs is
  // set, otherwise the top rung only. `workers` > 1 runs replicas on threads
  // between barriers; output does not depend on it.
  void run(std::uint64_t steps, std::uint64_t subsample_every, const Reservoir* reservoir, const RungSink& sink,
           bool all_rungs = false, int workers = 1);

  // One exchange round (alternating even / odd pairs).
  void exchange_round(const Reservoir* reservoir);

  const LadderConfig& config() const { return config_; }
  const SwapStats& stats() const { return stats_; }
  std::uint64_t rounds() const { return rounds_; }
  std::size_t first_live_rung() const { return config_.live_base ? 0 : 1; }
  std::vector<RecomChain>& replicas() { return replicas_; }
  const std::vector<RecomChain>& replicas() const { return replicas_; }
  RecomChain& replica_at_rung(std::size_t rung) { return replicas_[rung - first_live_rung()]; }

  std::string serialize_checkpoint() const;
  void restore_checkpoint(const std::string& text);
  void save_checkpoint(const std::filesystem::path& path) const;
  void load_checkpoint(const std::filesystem::path& path);

 private:
  const RegionGraph* g_;
  MeasureParams base_;
  LadderConfig config_;
  std::vector<RecomChain> replicas_;
  std::vector<Rng> rngs_;
  Rng coordinator_;
  SwapStats stats_;
  std::uint64_t rounds_ = 0;
  std::uint64_t local_steps_ = 0;  // steps since the last exchange round
};

struct SpacingEstimate {
  double delta_gamma = 0.0;
  bool unbounded = false;
  double acceptance = 1.0;  // estimated acceptance at delta_gamma
};

// Mean over ordered sample pairs (i != j) of min(1, exp(dgamma w (J_i - J_j))).
double expected_swap_acceptance(const std::vector<double>& J, double w, double delta_gamma,
                                const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

// Largest gamma increment whose expected swap acceptance is >= target_rate,
// by bisection to relative precision 1e-3. All ordered pairs are used when
// there are at most max_pairs of them, otherwise max_pairs random ones.
// Unbounded when the acceptance never drops below the target.
SpacingEstimate estimate_gamma_spacing(const std::vector<double>& J, double w, double target_rate, Rng& rng,
                                       std::size_t max_pairs = 1'000'000);

struct ReservoirSpec {
  int chains = 4;
  std::uint64_t steps = 10'000'000;
  std::uint64_t subsample_every = 25;
  double burn_in_fraction = 0.0;
};

// Independent gamma = 0 chains (chain c uses Rng::stream(seed, c)), each
// started from `initial` with a fresh random forest, or from its own random
// plan when `initial` is null. Pools states with step > burn-in whose step is
// a multiple of subsample_every, chain by chain.
Reservoir reservoir_build(const RegionGraph& g, MeasureParams p, const Plan* initial, const ReservoirSpec& spec,
                          std::uint64_t seed, int workers = 1);

// One JSON object per line: J, optional log_tau_sum, assignment, forest
// (edge indices).
void save_reservoir(const Reservoir& r, const std::filesystem::path& path);
Reservoir load_reservoir(const RegionGraph& g, const std::filesystem::path& path);

}  // namespace trecom
