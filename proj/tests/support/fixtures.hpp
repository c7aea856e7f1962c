#pragma once

// Shared test fixtures and brute-force oracles. Everything here is computed
// independently of the sampler: plans by exhaustive enumeration, tree counts
// by enumerating edge subsets.

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "trecom/graph.hpp"
#include "trecom/measures.hpp"

namespace trecom::testing {

// rows x cols grid of unit squares, population 1 per cell; county of a cell
// given by county_of_col[col] (defaults to a single county).
inline RegionGraph make_grid(int rows, int cols, std::vector<std::string> county_of_col = {},
                             std::vector<std::string> elections = {}) {
  if (county_of_col.empty()) county_of_col.assign(cols, "C");
  std::vector<Unit> units;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      Unit u;
      u.id = "r" + std::to_string(r) + "c" + std::to_string(c);
      u.population = 1.0;
      u.area = 1.0;
      u.exterior_perimeter = (r == 0) + (r == rows - 1) + (c == 0) + (c == cols - 1);
      u.county = county_of_col[c];
      u.bvap = 1.0;
      u.tvap = 2.0;
      u.votes.assign(elections.size(), VoteCount{1.0, 1.0});
      units.push_back(u);
    }
  std::vector<Edge> edges;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      if (c + 1 < cols) edges.push_back({v, v + 1, 1.0});
      if (r + 1 < rows) edges.push_back({v, v + cols, 1.0});
    }
  return RegionGraph(std::move(units), std::move(edges), std::move(elections));
}

// Small graph from unit populations, counties and index-pair edges; every
// unit is a unit square, every edge has length 1.
inline RegionGraph make_graph(const std::vector<double>& pops, const std::vector<std::string>& counties,
                              const std::vector<std::pair<int, int>>& edges, bool require_connected = true) {
  std::vector<Unit> units;
  for (std::size_t i = 0; i < pops.size(); ++i) {
    Unit u;
    u.id = std::string(1, static_cast<char>('a' + i));
    u.population = pops[i];
    u.area = 1.0;
    u.exterior_perimeter = 4.0;
    u.county = counties.empty() ? "C" : counties[i];
    units.push_back(u);
  }
  std::vector<Edge> es;
  for (const auto& [a, b] : edges) es.push_back({std::min(a, b), std::max(a, b), 1.0});
  return RegionGraph(std::move(units), std::move(es), {}, GraphCheck{require_connected});
}

inline RegionGraph make_path(const std::vector<double>& pops, const std::vector<std::string>& counties = {}) {
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i + 1 < pops.size(); ++i) edges.emplace_back(static_cast<int>(i), static_cast<int>(i + 1));
  return make_graph(pops, counties, edges);
}

inline Plan make_plan(std::vector<DistrictIndex> assignment, int k) {
  Plan p;
  p.assignment = std::move(assignment);
  p.num_districts = k;
  return p;
}

// Uniform random connected multigraph on n vertices: a random spanning tree
// plus extra edges, parallel edges allowed.
template <class Rng>
Multigraph random_connected_multigraph(int n, int extra, Rng& rng) {
  Multigraph mg;
  mg.num_vertices = n;
  for (int v = 1; v < n; ++v) mg.edges.emplace_back(static_cast<int>(rng.uniform_index(v)), v);
  for (int i = 0; i < extra && n > 1; ++i) {
    int a = static_cast<int>(rng.uniform_index(n)), b = static_cast<int>(rng.uniform_index(n));
    if (a == b) continue;
    mg.edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  return mg;
}

// The acceptance oracle instance: 4x4 grid, counties {col 0}, {cols 1-2},
// {col 3}, K = 2, at most one split county.
inline RegionGraph oracle_grid() { return make_grid(4, 4, {"A", "B", "B", "C"}); }
inline MeasureParams oracle_params(double gamma, double w) {
  MeasureParams p;
  p.gamma = gamma;
  p.w = w;
  p.num_districts = 2;
  p.pop_tolerance = 0.01;
  p.max_county_splits = 1;
  return p;
}

// All feasible 2-district plans (unit 0 always in district 0) by bitmask.
inline std::vector<Plan> enumerate_two_district_plans(const RegionGraph& g, const MeasureParams& p) {
  const int n = static_cast<int>(g.num_units());
  std::vector<Plan> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (mask & 1u) continue;
    Plan plan;
    plan.num_districts = 2;
    plan.assignment.resize(n);
    for (int u = 0; u < n; ++u) plan.assignment[u] = (mask >> u) & 1u;
    bool both = false;
    for (int u = 0; u < n; ++u) both |= plan.assignment[u] == 1;
    if (!both) continue;
    if (constraint_check(g, plan, p).ok) out.push_back(plan);
  }
  return out;
}

// Exact normalized plan probabilities under the plan-space density.
inline std::vector<double> exact_distribution(const RegionGraph& g, const std::vector<Plan>& plans,
                                              const MeasureParams& p) {
  std::vector<double> logw;
  for (const Plan& plan : plans) logw.push_back(log_density(g, plan, StateSpace::Plan, p));
  const double mx = *std::max_element(logw.begin(), logw.end());
  std::vector<double> prob;
  double z = 0.0;
  for (double l : logw) z += std::exp(l - mx);
  for (double l : logw) prob.push_back(std::exp(l - mx) / z);
  return prob;
}

// Canonical key of a plan: labels relabelled in order of first appearance.
inline std::vector<int> canonical(const Plan& plan) {
  std::vector<int> map(plan.num_districts, -1), out;
  int next = 0;
  for (int d : plan.assignment) {
    if (map[d] < 0) map[d] = next++;
    out.push_back(map[d]);
  }
  return out;
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::fabs(a[i] - b[i]);
  return 0.5 * tv;
}

// Spanning trees of a small multigraph by enumerating (n-1)-edge subsets.
// Returns the edge-index sets.
inline std::vector<std::vector<int>> enumerate_spanning_trees(const Multigraph& mg) {
  const int n = mg.num_vertices;
  const int m = static_cast<int>(mg.edges.size());
  std::vector<std::vector<int>> out;
  if (n <= 1) {
    out.push_back({});
    return out;
  }
  std::vector<int> pick(n - 1);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n - 1) {
      std::vector<int> parent(n);
      std::iota(parent.begin(), parent.end(), 0);
      std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
      for (int e : pick) {
        const int a = find(mg.edges[e].first), b = find(mg.edges[e].second);
        if (a == b) return;
        parent[a] = b;
      }
      out.push_back(pick);
      return;
    }
    for (int e = start; e < m; ++e) {
      pick[depth] = e;
      rec(e + 1, depth + 1);
    }
  };
  rec(0, 0);
  return out;
}


// Proposal kernel by exhaustion: for every adjacent pair, every
// hierarchy-respecting spanning tree of the merged region (enumerated edge
// subsets, fragment connectivity checked by component counts) and every
// population-balanced cut. Keys are (new assignment, tree of the relabelled
// district a, tree of district b, a, b); values are probabilities. Mass
// of proposals with no balanced cut is returned in `self_loop`.
struct ProposalKey {
  std::vector<DistrictIndex> assignment;
  std::vector<EdgeIndex> tree_a, tree_b;
  DistrictIndex a = 0, b = 0;
  auto operator<=>(const ProposalKey&) const = default;
};

inline std::map<ProposalKey, double> enumerate_proposals(const RegionGraph& g, const Plan& plan,
                                                         const MeasureParams& p, double* self_loop = nullptr) {
  const int k = plan.num_districts;
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      bool adjacent = false;
      for (const Edge& e : g.edges()) {
        const int x = plan.assignment[e.u], y = plan.assignment[e.v];
        adjacent |= (x == a && y == b) || (x == b && y == a);
      }
      if (adjacent) pairs.emplace_back(a, b);
    }
  std::map<ProposalKey, double> out;
  double loop = 0.0;
  const double ideal = g.total_population() / k;
  // (component count, root of every vertex)
  auto components = [&](const std::vector<UnitIndex>& verts, const std::vector<EdgeIndex>& edges) {
    std::map<UnitIndex, UnitIndex> parent;
    for (UnitIndex v : verts) parent[v] = v;
    std::function<UnitIndex(UnitIndex)> find = [&](UnitIndex x) {
      return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    int count = static_cast<int>(verts.size());
    for (EdgeIndex e : edges) {
      const UnitIndex a = find(g.edge(e).u), b = find(g.edge(e).v);
      if (a != b) parent[a] = b, --count;
    }
    std::map<UnitIndex, UnitIndex> root;
    for (UnitIndex v : verts) root[v] = find(v);
    return std::make_pair(count, root);
  };
  for (const auto& [a, b] : pairs) {
    std::vector<UnitIndex> region;
    for (UnitIndex u = 0; u < static_cast<UnitIndex>(g.num_units()); ++u)
      if (plan.assignment[u] == a || plan.assignment[u] == b) region.push_back(u);
    std::vector<char> in(g.num_units(), 0);
    for (UnitIndex u : region) in[u] = 1;
    std::vector<EdgeIndex> redges;
    for (EdgeIndex e = 0; e < static_cast<EdgeIndex>(g.num_edges()); ++e)
      if (in[g.edge(e).u] && in[g.edge(e).v]) redges.push_back(e);
    // Units of R per county and their in-county graph components.
    std::map<CountyIndex, std::vector<UnitIndex>> by_county;
    for (UnitIndex u : region) by_county[g.county_of(u)].push_back(u);
    auto county_edges = [&](const std::vector<EdgeIndex>& es, CountyIndex c) {
      std::vector<EdgeIndex> kept;
      for (EdgeIndex e : es)
        if (g.county_of(g.edge(e).u) == c && g.county_of(g.edge(e).v) == c) kept.push_back(e);
      return kept;
    };
    std::map<CountyIndex, int> graph_comps;
    for (const auto& [c, units] : by_county) graph_comps[c] = components(units, county_edges(redges, c)).first;

    Multigraph mg;
    mg.num_vertices = static_cast<int>(region.size());
    for (EdgeIndex e : redges) {
      const int x = static_cast<int>(std::lower_bound(region.begin(), region.end(), g.edge(e).u) - region.begin());
      const int y = static_cast<int>(std::lower_bound(region.begin(), region.end(), g.edge(e).v) - region.begin());
      mg.edges.emplace_back(x, y);
    }
    std::vector<std::vector<EdgeIndex>> trees;
    for (const auto& local : enumerate_spanning_trees(mg)) {
      std::vector<EdgeIndex> t;
      for (int i : local) t.push_back(redges[i]);
      bool hier = true;
      for (const auto& [c, units] : by_county) hier = hier && components(units, county_edges(t, c)).first == graph_comps[c];
      if (hier) trees.push_back(t);
    }
    const double w_tree = 1.0 / (static_cast<double>(pairs.size()) * static_cast<double>(trees.size()));
    for (const auto& t : trees) {
      std::vector<ProposalKey> produced;
      for (std::size_t cut = 0; cut < t.size(); ++cut) {
        std::vector<EdgeIndex> rest;
        for (std::size_t i = 0; i < t.size(); ++i)
          if (i != cut) rest.push_back(t[i]);
        const auto comp = components(region, rest).second;
        auto find = [&comp](UnitIndex u) { return comp.at(u); };
        const UnitIndex root = find(region.front());
        double pop_root = 0.0, pop_other = 0.0;
        for (UnitIndex u : region) (find(u) == root ? pop_root : pop_other) += g.unit(u).population;
        if (!within_tolerance(pop_root, ideal, p.pop_tolerance) || !within_tolerance(pop_other, ideal, p.pop_tolerance))
          continue;
        ProposalKey key;
        key.a = plan.assignment[region.front()];
        key.b = key.a == a ? b : a;
        key.assignment = plan.assignment;
        for (UnitIndex u : region) key.assignment[u] = find(u) == root ? key.a : key.b;
        for (EdgeIndex e : rest) (find(g.edge(e).u) == root ? key.tree_a : key.tree_b).push_back(e);
        produced.push_back(std::move(key));
      }
      if (produced.empty()) loop += w_tree;
      for (const ProposalKey& key : produced) out[key] += w_tree / static_cast<double>(produced.size());
    }
  }
  if (self_loop) *self_loop = loop;
  return out;
}

// All feasible plans with K districts by labelled enumeration (first
// appearance order), for tiny graphs.
inline std::vector<Plan> enumerate_plans(const RegionGraph& g, const MeasureParams& p) {
  const int n = static_cast<int>(g.num_units());
  const int k = p.num_districts;
  std::vector<Plan> out;
  Plan plan;
  plan.num_districts = k;
  plan.assignment.assign(n, 0);
  std::function<void(int, int)> rec = [&](int u, int used) {
    if (u == n) {
      if (used == k && constraint_check(g, plan, p).ok) out.push_back(plan);
      return;
    }
    for (int d = 0; d <= std::min(used, k - 1); ++d) {
      plan.assignment[u] = d;
      rec(u + 1, std::max(used, d + 1));
    }
  };
  rec(0, 0);
  return out;
}

}  // namespace trecom::testing
