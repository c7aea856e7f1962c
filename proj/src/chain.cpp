#include "trecom/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "detail/region_index.hpp"
#include "trecom/error.hpp"

namespace trecom {

using detail::RegionIndex;
using detail::fragment_labels;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<UnitIndex> merge_sorted(std::span<const UnitIndex> a, std::span<const UnitIndex> b) {
  std::vector<UnitIndex> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Number of balanced cuts of a tree given as local adjacency plus one extra
// edge (x, y).
int count_balanced_cuts(const std::vector<std::vector<int>>& adj, int x, int y,
                        const std::vector<double>& pop, double ideal, double tol) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> parent(n, -1);
  std::vector<char> seen(n, 0);
  order.push_back(0);
  seen[0] = 1;
  auto visit = [&](int from, int to) {
    if (seen[to]) return;
    seen[to] = 1;
    parent[to] = from;
    order.push_back(to);
  };
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int v = order[k];
    for (int w : adj[v]) visit(v, w);
    if (v == x) visit(v, y);
    if (v == y) visit(v, x);
  }
  std::vector<double> sub(pop);
  for (std::size_t k = order.size(); k-- > 1;) sub[parent[order[k]]] += sub[order[k]];
  int count = 0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const double below = sub[order[k]];
    if (within_tolerance(below, ideal, tol) && within_tolerance(sub[0] - below, ideal, tol)) ++count;
  }
  return count;
}

// Component labels of `units` restricted to each county; returns the number
// of such components per region fragment.
void count_district_fragments(const RegionGraph& g, const RegionIndex& region, const std::vector<int>& frag,
                              std::span<const UnitIndex> units, std::vector<int>& per_region_frag) {
  RegionIndex idx(g, units);
  int count = 0;
  const std::vector<int> labels = fragment_labels(g, idx, count);
  std::vector<char> counted(count, 0);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (counted[labels[i]]) continue;
    counted[labels[i]] = 1;
    ++per_region_frag[frag[region.local(idx.units()[i])]];
  }
}

// log of sum over admissible linking edges e of 1/|balanced_cuts(T_a ∪ T_b ∪ e)|.
// An edge is admissible when T_a ∪ T_b ∪ e is a hierarchical tree of the
// merged region: either every region fragment lies within one district
// fragment and e crosses fragments, or exactly one region fragment is shared
// by one fragment of each district and e lies inside it.
double log_link_sum(const RegionGraph& g, const MeasureParams& p, std::span<const UnitIndex> region,
                    std::span<const UnitIndex> units_a, const Tree& tree_a,
                    std::span<const UnitIndex> units_b, const Tree& tree_b) {
  const double ideal = g.total_population() / p.num_districts;
  double pop_a = 0.0, pop_b = 0.0;
  for (UnitIndex u : units_a) pop_a += g.unit(u).population;
  for (UnitIndex u : units_b) pop_b += g.unit(u).population;
  if (!within_tolerance(pop_a, ideal, p.pop_tolerance) || !within_tolerance(pop_b, ideal, p.pop_tolerance))
    return kNegInf;

  RegionIndex idx(g, region);
  int num_frags = 0;
  const std::vector<int> frag = fragment_labels(g, idx, num_frags);
  std::vector<int> per_frag(num_frags, 0);
  count_district_fragments(g, idx, frag, units_a, per_frag);
  count_district_fragments(g, idx, frag, units_b, per_frag);
  int shared = -1;
  for (int f = 0; f < num_frags; ++f) {
    if (per_frag[f] == 1) continue;
    if (per_frag[f] != 2 || shared >= 0) return kNegInf;
    shared = f;
  }

  std::vector<std::vector<int>> adj(idx.size());
  auto add_tree = [&](const Tree& t) {
    for (EdgeIndex e : t) {
      const int a = idx.local(g.edge(e).u);
      const int b = idx.local(g.edge(e).v);
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
  };
  add_tree(tree_a);
  add_tree(tree_b);
  std::vector<double> pop(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) pop[i] = g.unit(idx.units()[i]).population;

  double sum = 0.0;
  for (EdgeIndex e : connecting_edges(g, units_a, units_b)) {
    const int x = idx.local(g.edge(e).u);
    const int y = idx.local(g.edge(e).v);
    const bool admissible = shared < 0 ? frag[x] != frag[y] : (frag[x] == shared && frag[y] == shared);
    if (!admissible) continue;
    const int cuts = count_balanced_cuts(adj, x, y, pop, ideal, p.pop_tolerance);
    if (cuts > 0) sum += 1.0 / cuts;
  }
  return sum > 0.0 ? std::log(sum) : kNegInf;
}

int splits_from_counts(const std::vector<int>& county_counts, int num_districts) {
  int splits = 0;
  const std::size_t counties = county_counts.size() / num_districts;
  for (std::size_t c = 0; c < counties; ++c) {
    int present = 0;
    for (int d = 0; d < num_districts; ++d) present += county_counts[c * num_districts + d] > 0;
    splits += present >= 2;
  }
  return splits;
}

int pairs_from_counts(const std::vector<int>& pair_counts, int num_districts) {
  int n = 0;
  for (int a = 0; a < num_districts; ++a)
    for (int b = a + 1; b < num_districts; ++b) n += pair_counts[a * num_districts + b] > 0;
  return n;
}

// Each county meets the district in at most one connected piece.
bool traverses_counties_once(const RegionGraph& g, std::span<const UnitIndex> units) {
  RegionIndex idx(g, units);
  int count = 0;
  const std::vector<int> labels = fragment_labels(g, idx, count);
  std::vector<char> county_seen(g.num_counties(), 0);
  std::vector<char> label_seen(count, 0);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (label_seen[labels[i]]) continue;
    label_seen[labels[i]] = 1;
    const CountyIndex c = g.county_of(idx.units()[i]);
    if (county_seen[c]) return false;
    county_seen[c] = 1;
  }
  return true;
}

}  // namespace

RecomChain::RecomChain(const RegionGraph& g, MeasureParams params, ChainState initial)
    : g_(&g), params_(params), state_(std::move(initial)) {
  params_.validate();
  validate_plan(g, state_.plan);
  if (state_.plan.num_districts != params_.num_districts)
    throw ValidationError("plan has " + std::to_string(state_.plan.num_districts) + " districts, expected " +
                          std::to_string(params_.num_districts));
  const ConstraintReport rep = constraint_check(g, state_.plan, params_);
  if (!rep.ok) throw ValidationError("initial plan is infeasible: " + rep.violations.front().detail);
  if (state_.forest.trees.size() != static_cast<std::size_t>(params_.num_districts))
    throw ValidationError("forest does not have one tree per district");
  const auto districts = state_.plan.district_units();
  for (int d = 0; d < params_.num_districts; ++d)
    if (!is_hierarchical_tree(g, districts[d], state_.forest.trees[d]))
      throw ValidationError("tree " + std::to_string(d) + " is not a hierarchical spanning tree of its district");
  rebuild_caches();
}

void RecomChain::rebuild_caches() {
  const RegionGraph& g = *g_;
  const int k = params_.num_districts;
  members_ = state_.plan.district_units();
  district_pop_.assign(k, 0.0);
  county_counts_.assign(g.num_counties() * k, 0);
  pair_counts_.assign(static_cast<std::size_t>(k) * k, 0);
  const auto& assign = state_.plan.assignment;
  for (UnitIndex u = 0; u < static_cast<UnitIndex>(g.num_units()); ++u) {
    district_pop_[assign[u]] += g.unit(u).population;
    ++county_counts_[g.county_of(u) * k + assign[u]];
  }
  for (const Edge& e : g.edges()) {
    const int a = assign[e.u], b = assign[e.v];
    if (a == b) continue;
    ++pair_counts_[a * k + b];
    ++pair_counts_[b * k + a];
  }
  ScoreBreakdown& s = state_.cached;
  s = ScoreBreakdown{};
  for (int d = 0; d < k; ++d) {
    const double iso = district_shape(g, members_[d], assign).iso();
    s.per_district_iso.push_back(iso);
    s.per_district_pp.push_back(4.0 * M_PI / iso);
  }
  for (double iso : s.per_district_iso) s.J += iso;
  if (params_.interpolate_tree_weight)
    for (int d = 0; d < k; ++d) s.log_tau.push_back(log_hierarchical_tree_count(g, members_[d]));
  s.splits = splits_from_counts(county_counts_, k);
  s.constraint_ok = true;
}

double RecomChain::tempering_energy() const {
  double e = params_.w * state_.cached.J;
  for (double t : state_.cached.log_tau) e += t;
  return e;
}

int RecomChain::num_adjacent_pairs() const { return pairs_from_counts(pair_counts_, params_.num_districts); }

ProposalRecord RecomChain::propose(Rng& rng) const {
  const RegionGraph& g = *g_;
  const int k = params_.num_districts;
  ProposalRecord rec;
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      if (pair_counts_[a * k + b] > 0) pairs.emplace_back(a, b);
  rec.num_pairs = static_cast<int>(pairs.size());
  if (pairs.empty()) {
    rec.self_loop = true;
    return rec;
  }
  const auto [a, b] = pairs[rng.uniform_index(pairs.size())];
  const std::vector<UnitIndex> region = merge_sorted(members_[a], members_[b]);
  const Tree tree = hierarchical_tree_draw(g, region, rng);
  const auto cuts = balanced_cuts(g, region, tree, params_.pop_tolerance, k, g.total_population());
  rec.num_cuts = static_cast<int>(cuts.size());
  if (cuts.empty()) {
    rec.district_a = a;
    rec.district_b = b;
    rec.self_loop = true;
    return rec;
  }
  const CutCandidate& cut = cuts[rng.uniform_index(cuts.size())];
  TreeSplit split = split_tree(g, region, tree, cut.edge);
  const int keep = state_.plan.assignment[region.front()];
  rec.district_a = keep;
  rec.district_b = keep == a ? b : a;
  rec.units_a = std::move(split.root_side_units);
  rec.tree_a = std::move(split.root_side_tree);
  rec.units_b = std::move(split.other_units);
  rec.tree_b = std::move(split.other_tree);
  return rec;
}

void RecomChain::evaluate(ProposalRecord& rec) const {
  const RegionGraph& g = *g_;
  const int k = params_.num_districts;
  const int a = rec.district_a, b = rec.district_b;
  const auto& old_assign = state_.plan.assignment;

  std::vector<DistrictIndex> assign(old_assign);
  for (UnitIndex u : rec.units_a) assign[u] = a;
  for (UnitIndex u : rec.units_b) assign[u] = b;

  // Population balance and the traversal rule for the two new districts.
  const double ideal = g.total_population() / k;
  double pop_a = 0.0, pop_b = 0.0;
  for (UnitIndex u : rec.units_a) pop_a += g.unit(u).population;
  for (UnitIndex u : rec.units_b) pop_b += g.unit(u).population;
  rec.feasible = within_tolerance(pop_a, ideal, params_.pop_tolerance) &&
                 within_tolerance(pop_b, ideal, params_.pop_tolerance) &&
                 traverses_counties_once(g, rec.units_a) && traverses_counties_once(g, rec.units_b);

  std::vector<int> counties(county_counts_);
  for (UnitIndex u : rec.units_a) {
    --counties[g.county_of(u) * k + old_assign[u]];
    ++counties[g.county_of(u) * k + a];
  }
  for (UnitIndex u : rec.units_b) {
    --counties[g.county_of(u) * k + old_assign[u]];
    ++counties[g.county_of(u) * k + b];
  }
  rec.new_splits = splits_from_counts(counties, k);
  rec.feasible = rec.feasible && rec.new_splits <= params_.max_county_splits;

  std::vector<double> iso(state_.cached.per_district_iso);
  iso[a] = district_shape(g, rec.units_a, assign).iso();
  iso[b] = district_shape(g, rec.units_b, assign).iso();
  rec.new_J = 0.0;
  for (double v : iso) rec.new_J += v;

  if (!rec.feasible) {
    rec.log_accept = kNegInf;
    return;
  }

  std::vector<int> pairs(pair_counts_);
  const std::vector<UnitIndex> region = merge_sorted(members_[a], members_[b]);
  for (UnitIndex u : region) {
    for (const Incidence& inc : g.incident(u)) {
      const UnitIndex v = inc.neighbor;
      const bool v_in_region = old_assign[v] == a || old_assign[v] == b;
      if (v_in_region && v < u) continue;
      const int oa = old_assign[u], ob = old_assign[v];
      if (oa != ob) {
        --pairs[oa * k + ob];
        --pairs[ob * k + oa];
      }
      const int na = assign[u], nb = assign[v];
      if (na != nb) {
        ++pairs[na * k + nb];
        ++pairs[nb * k + na];
      }
    }
  }
  const int new_num_pairs = pairs_from_counts(pairs, k);

  rec.log_q_fwd = -std::log(static_cast<double>(rec.num_pairs)) +
                  log_link_sum(g, params_, region, rec.units_a, rec.tree_a, rec.units_b, rec.tree_b);
  rec.log_q_rev = -std::log(static_cast<double>(new_num_pairs)) +
                  log_link_sum(g, params_, region, members_[a], state_.forest.trees[a], members_[b],
                               state_.forest.trees[b]);
  double delta_density = -params_.gamma * params_.w * (rec.new_J - state_.cached.J);
  if (params_.interpolate_tree_weight) {
    rec.new_log_tau_a = log_hierarchical_tree_count(g, rec.units_a);
    rec.new_log_tau_b = log_hierarchical_tree_count(g, rec.units_b);
    const auto& old = state_.cached.log_tau;
    delta_density -= params_.gamma * ((rec.new_log_tau_a - old[a]) + (rec.new_log_tau_b - old[b]));
  }
  rec.log_accept = rec.log_q_rev == kNegInf ? kNegInf : delta_density + rec.log_q_rev - rec.log_q_fwd;
}

void RecomChain::apply(const ProposalRecord& rec) {
  const RegionGraph& g = *g_;
  const int k = params_.num_districts;
  const int a = rec.district_a, b = rec.district_b;
  auto& assign = state_.plan.assignment;
  const std::vector<UnitIndex> region = merge_sorted(members_[a], members_[b]);

  auto pair_update = [&](int delta) {
    for (UnitIndex u : region) {
      for (const Incidence& inc : g.incident(u)) {
        const UnitIndex v = inc.neighbor;
        const bool v_in_region = std::binary_search(region.begin(), region.end(), v);
        if (v_in_region && v < u) continue;
        const int x = assign[u], y = assign[v];
        if (x == y) continue;
        pair_counts_[x * k + y] += delta;
        pair_counts_[y * k + x] += delta;
      }
    }
  };
  pair_update(-1);
  for (UnitIndex u : region) --county_counts_[g.county_of(u) * k + assign[u]];
  for (UnitIndex u : rec.units_a) assign[u] = a;
  for (UnitIndex u : rec.units_b) assign[u] = b;
  for (UnitIndex u : region) ++county_counts_[g.county_of(u) * k + assign[u]];
  pair_update(+1);

  members_[a] = rec.units_a;
  members_[b] = rec.units_b;
  district_pop_[a] = 0.0;
  district_pop_[b] = 0.0;
  for (UnitIndex u : rec.units_a) district_pop_[a] += g.unit(u).population;
  for (UnitIndex u : rec.units_b) district_pop_[b] += g.unit(u).population;
  state_.forest.trees[a] = rec.tree_a;
  state_.forest.trees[b] = rec.tree_b;

  ScoreBreakdown& s = state_.cached;
  for (int d : {a, b}) {
    s.per_district_iso[d] = district_shape(g, members_[d], assign).iso();
    s.per_district_pp[d] = 4.0 * M_PI / s.per_district_iso[d];
  }
  s.J = 0.0;
  for (double iso : s.per_district_iso) s.J += iso;
  if (params_.interpolate_tree_weight) {
    s.log_tau[a] = rec.new_log_tau_a;
    s.log_tau[b] = rec.new_log_tau_b;
  }
  s.splits = splits_from_counts(county_counts_, k);
}

bool RecomChain::step(Rng& rng, ProposalRecord* out) {
  ProposalRecord rec = propose(rng);
  if (!rec.self_loop) {
    evaluate(rec);
    const double u = rng.uniform01();
    rec.accepted = rec.feasible && std::log(u) <= rec.log_accept;
    if (rec.accepted) apply(rec);
  }
  ++state_.step;
  if (debug_checks) check_invariants();
  const bool accepted = rec.accepted;
  if (out) *out = std::move(rec);
  return accepted;
}

void RecomChain::swap_configuration(RecomChain& other) {
  if (other.g_ != g_ || other.params_.num_districts != params_.num_districts)
    throw RuntimeError("cannot exchange states between chains on different graphs");
  std::swap(state_.plan, other.state_.plan);
  std::swap(state_.forest, other.state_.forest);
  std::swap(state_.cached, other.state_.cached);
  std::swap(members_, other.members_);
  std::swap(district_pop_, other.district_pop_);
  std::swap(county_counts_, other.county_counts_);
  std::swap(pair_counts_, other.pair_counts_);
}

void RecomChain::adopt(const Plan& plan, const SpanningForest& forest) {
  state_.plan = plan;
  state_.forest = forest;
  rebuild_caches();
  if (debug_checks) check_invariants();
}

void RecomChain::check_invariants() const {
  const RegionGraph& g = *g_;
  ScoreBreakdown fresh = isoperimetric_score(g, state_.plan);
  fresh.splits = count_county_splits(g, state_.plan);
  fresh.constraint_ok = constraint_check(g, state_.plan, params_).ok;
  if (params_.interpolate_tree_weight)
    for (const auto& units : state_.plan.district_units())
      fresh.log_tau.push_back(log_hierarchical_tree_count(g, units));
  if (!(fresh == state_.cached)) throw RuntimeError("cached scores differ from recomputation");
  const auto districts = state_.plan.district_units();
  for (int d = 0; d < params_.num_districts; ++d) {
    if (districts[d] != members_[d]) throw RuntimeError("member cache out of date");
    if (!is_hierarchical_tree(g, districts[d], state_.forest.trees[d]))
      throw RuntimeError("tree " + std::to_string(d) + " does not span its district hierarchically");
  }
  RecomChain copy(g, params_, state_);
  if (copy.pair_counts_ != pair_counts_ || copy.county_counts_ != county_counts_)
    throw RuntimeError("adjacency caches out of date");
}

ChainState make_initial_state(const RegionGraph& g, const Plan& plan, const MeasureParams& p, Rng& rng) {
  validate_plan(g, plan);
  const ConstraintReport rep = constraint_check(g, plan, p);
  if (!rep.ok) throw ValidationError("initial plan is infeasible: " + rep.violations.front().detail);
  ChainState state;
  state.plan = plan;
  for (const auto& units : plan.district_units()) state.forest.trees.push_back(hierarchical_tree_draw(g, units, rng));
  state.cached = score_plan(g, plan, p);
  return state;
}

ProposalRecord propose_merge_split(const RegionGraph& g, const ChainState& state, const MeasureParams& p,
                                   Rng& rng) {
  RecomChain chain(g, p, state);
  ProposalRecord rec = chain.propose(rng);
  if (!rec.self_loop) chain.evaluate(rec);
  return rec;
}

double proposal_log_prob(const RegionGraph& g, const Plan& plan_from, DistrictIndex a, DistrictIndex b,
                         std::span<const UnitIndex> units_a, const Tree& tree_a,
                         std::span<const UnitIndex> units_b, const Tree& tree_b, const MeasureParams& p,
                         bool include_tree_normalizer) {
  const auto districts = plan_from.district_units();
  const std::vector<UnitIndex> region = merge_sorted(districts[a], districts[b]);
  std::vector<UnitIndex> target(units_a.begin(), units_a.end());
  target.insert(target.end(), units_b.begin(), units_b.end());
  std::sort(target.begin(), target.end());
  if (target != region) throw ValidationError("target trees do not cover the merged districts");
  if (units_a.empty() || units_b.empty()) return kNegInf;

  // The district holding the region's smallest unit keeps its label.
  const UnitIndex anchor = region.front();
  const bool anchor_in_a = std::binary_search(units_a.begin(), units_a.end(), anchor);
  if ((plan_from.assignment[anchor] == a) != anchor_in_a) return kNegInf;

  std::vector<int> counts(static_cast<std::size_t>(plan_from.num_districts) * plan_from.num_districts, 0);
  for (const Edge& e : g.edges()) {
    const int x = plan_from.assignment[e.u], y = plan_from.assignment[e.v];
    if (x != y) ++counts[x * plan_from.num_districts + y], ++counts[y * plan_from.num_districts + x];
  }
  const int num_pairs = pairs_from_counts(counts, plan_from.num_districts);
  if (num_pairs == 0) return kNegInf;

  std::vector<UnitIndex> sa(units_a.begin(), units_a.end()), sb(units_b.begin(), units_b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double value = -std::log(static_cast<double>(num_pairs)) + log_link_sum(g, p, region, sa, tree_a, sb, tree_b);
  if (include_tree_normalizer && value != kNegInf) value -= log_hierarchical_tree_count(g, region);
  return value;
}

ChainState mh_step(const RegionGraph& g, const ChainState& state, const MeasureParams& p, Rng& rng) {
  RecomChain chain(g, p, state);
  chain.step(rng);
  return chain.state();
}

void run_chain(RecomChain& chain, std::uint64_t steps, std::uint64_t subsample_every, Rng& rng,
               const StateSink& sink) {
  if (subsample_every == 0) throw ValidationError("subsample interval must be positive");
  for (std::uint64_t s = 0; s < steps; ++s) {
    chain.step(rng);
    if (chain.state().step % subsample_every == 0 && sink) sink(chain.state());
  }
}

Plan random_initial_plan(const RegionGraph& g, const MeasureParams& p, Rng& rng, int max_attempts) {
  p.validate();
  const int k = p.num_districts;
  const double ideal = g.total_population() / k;
  const auto n = static_cast<UnitIndex>(g.num_units());
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Plan plan;
    plan.num_districts = k;
    plan.assignment.assign(n, k - 1);
    std::vector<UnitIndex> remaining(n);
    for (UnitIndex u = 0; u < n; ++u) remaining[u] = u;
    bool ok = true;
    for (int d = 0; d < k - 1 && ok; ++d) {
      const Tree tree = hierarchical_tree_draw(g, remaining, rng);
      RegionIndex idx(g, remaining);
      std::vector<std::vector<Incidence>> adj(idx.size());
      for (EdgeIndex e : tree) {
        const int x = idx.local(g.edge(e).u), y = idx.local(g.edge(e).v);
        adj[x].push_back({y, e});
        adj[y].push_back({x, e});
      }
      std::vector<int> order{0}, parent(idx.size(), -1);
      std::vector<EdgeIndex> parent_edge(idx.size(), -1);
      std::vector<char> seen(idx.size(), 0);
      seen[0] = 1;
      for (std::size_t i = 0; i < order.size(); ++i)
        for (const Incidence& inc : adj[order[i]])
          if (!seen[inc.neighbor]) {
            seen[inc.neighbor] = 1;
            parent[inc.neighbor] = order[i];
            parent_edge[inc.neighbor] = inc.edge;
            order.push_back(inc.neighbor);
          }
      std::vector<double> sub(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) sub[i] = g.unit(idx.units()[i]).population;
      for (std::size_t i = order.size(); i-- > 1;) sub[parent[order[i]]] += sub[order[i]];
      const double rest_target = ideal * (k - d - 1);
      // (edge, take the subtree side?)
      std::vector<std::pair<EdgeIndex, bool>> options;
      for (std::size_t i = 1; i < order.size(); ++i) {
        const double below = sub[order[i]], above = sub[0] - below;
        const double tol = p.pop_tolerance * ideal;
        if (std::fabs(below - ideal) <= tol && std::fabs(above - rest_target) <= tol * (k - d - 1))
          options.emplace_back(parent_edge[order[i]], true);
        if (std::fabs(above - ideal) <= tol && std::fabs(below - rest_target) <= tol * (k - d - 1))
          options.emplace_back(parent_edge[order[i]], false);
      }
      if (options.empty()) {
        ok = false;
        break;
      }
      const auto [edge, take_below] = options[rng.uniform_index(options.size())];
      TreeSplit split = split_tree(g, remaining, tree, edge);
      // root side holds remaining.front(); the subtree side is the other one.
      std::vector<UnitIndex>& piece = take_below ? split.other_units : split.root_side_units;
      std::vector<UnitIndex>& rest = take_below ? split.root_side_units : split.other_units;
      for (UnitIndex u : piece) plan.assignment[u] = d;
      remaining = std::move(rest);
    }
    if (ok && constraint_check(g, plan, p).ok) return plan;
  }
  throw RuntimeError("could not construct a feasible initial plan in " + std::to_string(max_attempts) +
                     " attempts");
}

}  // namespace trecom
