#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "trecom/forest.hpp"
#include "trecom/graph.hpp"
#include "trecom/measures.hpp"
#include "trecom/rng.hpp"

namespace trecom {

struct ChainState {
  Plan plan;
  SpanningForest forest;
  ScoreBreakdown cached;
  std::uint64_t step = 0;
};

// One merge-split proposal and, after evaluation, its acceptance data.
//
// log_q_fwd / log_q_rev omit the factor 1/tau_hier(merged region): both
// directions share the same merged region, so it cancels in the ratio.
// proposal_log_prob() reports the complete probability.
struct ProposalRecord {
  DistrictIndex district_a = -1;  // keeps the merged region's smallest unit
  DistrictIndex district_b = -1;
  std::vector<UnitIndex> units_a, units_b;
  Tree tree_a, tree_b;
  int num_pairs = 0;
  int num_cuts = 0;
  bool self_loop = false;

  bool feasible = false;
  double new_J = 0.0;
  double new_log_tau_a = 0.0, new_log_tau_b = 0.0;  // interpolating family only
  int new_splits = 0;
  double log_q_fwd = 0.0;
  double log_q_rev = 0.0;
  double log_accept = 0.0;
  bool accepted = false;
};

// Metropolized merge-split chain on hierarchical spanning forests, targeting
// the forest lift exp(-gamma w J) 1_C. Keeps incremental per-district caches
// (shapes, county counts, district adjacency) so a step touches only the
// merged region.
class RecomChain {
 public:
  RecomChain(const RegionGraph& g, MeasureParams params, ChainState initial);

  const ChainState& state() const { return state_; }
  const MeasureParams& params() const { return params_; }
  void set_gamma(double gamma) { params_.gamma = gamma; }
  const RegionGraph& graph() const { return *g_; }

  // E with forest density -gamma E: w J, plus sum log tau_hier for the
  // interpolating family. Replica swaps depend on this alone.
  double tempering_energy() const;

  // Number of adjacent district pairs in the current plan.
  int num_adjacent_pairs() const;

  ProposalRecord propose(Rng& rng) const;
  // Fills feasibility, scores and log acceptance of a non-self-loop proposal.
  void evaluate(ProposalRecord& rec) const;
  void apply(const ProposalRecord& rec);

  // One Metropolis-Hastings step; returns whether a move was accepted.
  bool step(Rng& rng, ProposalRecord* out = nullptr);

  // Exchange plan, forest and caches with another chain over the same graph;
  // step counters and parameters stay in place.
  void swap_configuration(RecomChain& other);
  // Replace plan and forest (e.g. from a reservoir record); caches rebuilt.
  void adopt(const Plan& plan, const SpanningForest& forest);

  // Recompute everything from scratch and throw RuntimeError on mismatch.
  void check_invariants() const;
  bool debug_checks = false;

 private:
  void rebuild_caches();

  const RegionGraph* g_;
  MeasureParams params_;
  ChainState state_;
  std::vector<std::vector<UnitIndex>> members_;
  std::vector<double> district_pop_;
  std::vector<int> county_counts_;  // county * K + district
  std::vector<int> pair_counts_;    // a * K + b, symmetric
};

// Hierarchical trees drawn for every district of a feasible plan.
ChainState make_initial_state(const RegionGraph& g, const Plan& plan, const MeasureParams& p, Rng& rng);

ProposalRecord propose_merge_split(const RegionGraph& g, const ChainState& state, const MeasureParams& p,
                                   Rng& rng);

// Full log proposal probability of moving from `plan_from` to the forest
// pair (tree_a on units_a, tree_b on units_b) replacing districts a and b.
// Includes -log tau_hier(merged) when include_tree_normalizer is set.
double proposal_log_prob(const RegionGraph& g, const Plan& plan_from, DistrictIndex a, DistrictIndex b,
                         std::span<const UnitIndex> units_a, const Tree& tree_a,
                         std::span<const UnitIndex> units_b, const Tree& tree_b, const MeasureParams& p,
                         bool include_tree_normalizer = true);

ChainState mh_step(const RegionGraph& g, const ChainState& state, const MeasureParams& p, Rng& rng);

using StateSink = std::function<void(const ChainState&)>;

// Runs `steps` MH steps, emitting the state whenever its step counter is a
// multiple of subsample_every.
void run_chain(RecomChain& chain, std::uint64_t steps, std::uint64_t subsample_every, Rng& rng,
               const StateSink& sink);

// Recursive tree bipartition of the whole graph into a feasible plan.
Plan random_initial_plan(const RegionGraph& g, const MeasureParams& p, Rng& rng, int max_attempts = 1000);

// Checkpoint: step, rng state, assignment and forest (as unit-id pairs).
struct Checkpoint {
  ChainState state;
  Rng rng;
};
std::string serialize_checkpoint(const RegionGraph& g, const ChainState& state, const Rng& rng);
Checkpoint parse_checkpoint(const RegionGraph& g, const MeasureParams& p, const std::string& text);
void save_checkpoint(const RegionGraph& g, const ChainState& state, const Rng& rng,
                     const std::filesystem::path& path);
Checkpoint load_checkpoint(const RegionGraph& g, const MeasureParams& p, const std::filesystem::path& path);

}  // namespace trecom
