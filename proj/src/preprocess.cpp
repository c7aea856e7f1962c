#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "trecom/error.hpp"
#include "trecom/graph.hpp"

namespace trecom {

namespace {

// Union-find over units that also tracks each class's members.
class UnitClasses {
 public:
  explicit UnitClasses(const RegionGraph& g) : g_(g), parent_(g.num_units()), members_(g.num_units()) {
    std::iota(parent_.begin(), parent_.end(), 0);
    for (std::size_t u = 0; u < members_.size(); ++u) members_[u] = {static_cast<UnitIndex>(u)};
  }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  // Smaller root wins so class representatives are stable.
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    members_[a].insert(members_[a].end(), members_[b].begin(), members_[b].end());
    std::sort(members_[a].begin(), members_[a].end());
    members_[b].clear();
  }
  const std::vector<UnitIndex>& members(int root) const { return members_[root]; }
  double population(int root) const {
    double s = 0.0;
    for (UnitIndex u : members_[root]) s += g_.unit(u).population;
    return s;
  }

 private:
  const RegionGraph& g_;
  std::vector<int> parent_;
  std::vector<std::vector<UnitIndex>> members_;
};

// Grow `collection` (a set of class roots) until every class in `targets` is
// linked through it, adding the cheapest chain of neighbor classes each round.
// Cost of a chain is the population it adds; ties go to the smaller unit id.
std::set<int> connect_collection(const RegionGraph& g, UnitClasses& uf, const std::set<int>& targets) {
  UnitClasses& cls = uf;
  std::set<int> collection = targets;

  auto class_neighbors = [&](int root) {
    std::set<int> out;
    for (UnitIndex u : cls.members(root))
      for (const Incidence& inc : g.incident(u)) {
        int r = uf.find(inc.neighbor);
        if (r != root) out.insert(r);
      }
    return out;
  };

  auto linked_component = [&](int start) {
    std::set<int> comp{start};
    std::vector<int> stack{start};
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y : class_neighbors(x))
        if (collection.count(y) && comp.insert(y).second) stack.push_back(y);
    }
    return comp;
  };

  while (true) {
    std::set<int> reached = linked_component(*targets.begin());
    bool done = std::all_of(targets.begin(), targets.end(), [&](int t) { return reached.count(t) > 0; });
    if (done) break;

    // Dijkstra from the linked component; entering a class outside the
    // collection costs its population.
    using Key = std::pair<double, int>;
    std::map<int, double> dist;
    std::map<int, int> prev;
    std::priority_queue<Key, std::vector<Key>, std::greater<>> pq;
    for (int r : reached) {
      dist[r] = 0.0;
      pq.push({0.0, r});
    }
    int hit = -1;
    while (!pq.empty()) {
      auto [d, x] = pq.top();
      pq.pop();
      if (d > dist[x]) continue;
      if (!reached.count(x) && collection.count(x)) {
        hit = x;
        break;
      }
      for (int y : class_neighbors(x)) {
        double step = collection.count(y) ? 0.0 : cls.population(y);
        double nd = d + step;
        auto it = dist.find(y);
        if (it == dist.end() || nd < it->second || (nd == it->second && prev.count(y) && x < prev[y])) {
          dist[y] = nd;
          prev[y] = x;
          pq.push({nd, y});
        }
      }
    }
    if (hit < 0) throw ValidationError("multi-polygon components cannot be linked through the graph");
    for (int x = hit; !reached.count(x); x = prev.at(x)) collection.insert(x);
  }
  return collection;
}

std::string join_ids(const RegionGraph& g, const std::vector<UnitIndex>& members) {
  std::string id;
  for (UnitIndex u : members) {
    if (!id.empty()) id += '+';
    id += g.unit(u).id;
  }
  return id;
}

}  // namespace

MergeResult merge_multipolygon_units(const RegionGraph& g, const MergeOptions& options) {
  const auto n = static_cast<UnitIndex>(g.num_units());
  std::map<std::string, std::vector<UnitIndex>> groups;
  for (UnitIndex u = 0; u < n; ++u) {
    const Unit& unit = g.unit(u);
    if (!unit.mp_component) continue;
    if (g.incident(u).empty())
      throw ValidationError("multi-polygon component \"" + unit.id + "\" has no neighbor");
    groups[*unit.mp_component].push_back(u);
  }

  UnitClasses uf(g);
  std::vector<MergeDecision> report;

  for (const auto& [tag, comps] : groups) {
    if (comps.size() < 2) continue;
    UnitIndex dominant = comps.front();
    for (UnitIndex u : comps)
      if (g.unit(u).population > g.unit(dominant).population) dominant = u;
    const CountyIndex home = g.county_of(dominant);

    std::vector<UnitIndex> core;
    for (UnitIndex u : comps) {
      if (g.county_of(u) == home) {
        core.push_back(u);
        continue;
      }
      if (!options.absorb_county_isolated) {
        report.push_back({tag, "isolated_kept", {g.unit(u).id}, g.unit(u).population});
        continue;
      }
      Incidence best = g.incident(u).front();
      for (const Incidence& inc : g.incident(u)) {
        const double len = g.edge(inc.edge).shared_length;
        const double best_len = g.edge(best.edge).shared_length;
        if (len > best_len || (len == best_len && g.unit(inc.neighbor).id < g.unit(best.neighbor).id))
          best = inc;
      }
      uf.unite(u, best.neighbor);
      report.push_back({tag, "isolated_absorbed", {g.unit(u).id, g.unit(best.neighbor).id},
                        g.unit(u).population});
    }
    if (core.size() < 2) continue;

    std::set<int> targets;
    for (UnitIndex u : core) targets.insert(uf.find(u));
    std::set<int> collection = connect_collection(g, uf, targets);

    UnitClasses& cls = uf;
    double pop = 0.0;
    std::vector<UnitIndex> members;
    for (int root : collection) {
      pop += cls.population(root);
      for (UnitIndex u : cls.members(root)) members.push_back(u);
    }
    std::sort(members.begin(), members.end());
    std::vector<std::string> ids;
    for (UnitIndex u : members) ids.push_back(g.unit(u).id);
    if (pop > options.pop_cap) {
      report.push_back({tag, "split_over_cap", std::move(ids), pop});
      continue;
    }
    for (int root : collection) uf.unite(*collection.begin(), root);
    report.push_back({tag, "merged", std::move(ids), pop});
  }

  // Rebuild: one node per class, ordered by smallest member.
  std::map<int, std::vector<UnitIndex>> by_root;
  for (UnitIndex u = 0; u < n; ++u) by_root[uf.find(u)].push_back(u);
  std::vector<int> new_index(g.num_units(), -1);
  std::vector<Unit> units;
  for (const auto& [root, members] : by_root) {
    Unit merged;
    merged.id = join_ids(g, members);
    merged.votes.assign(g.num_elections(), VoteCount{});
    UnitIndex dominant = members.front();
    for (UnitIndex u : members) {
      const Unit& src = g.unit(u);
      merged.population += src.population;
      merged.area += src.area;
      merged.exterior_perimeter += src.exterior_perimeter;
      merged.bvap += src.bvap;
      merged.tvap += src.tvap;
      for (std::size_t e = 0; e < g.num_elections(); ++e) merged.votes[e] += src.votes[e];
      if (src.population > g.unit(dominant).population) dominant = u;
      new_index[u] = static_cast<int>(units.size());
    }
    merged.county = g.unit(dominant).county;
    units.push_back(std::move(merged));
  }

  std::map<std::pair<int, int>, double> lengths;
  for (const Edge& ed : g.edges()) {
    int a = new_index[ed.u];
    int b = new_index[ed.v];
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    lengths[{a, b}] += ed.shared_length;
  }
  std::vector<Edge> edges;
  edges.reserve(lengths.size());
  for (const auto& [key, len] : lengths) edges.push_back({key.first, key.second, len});

  return {RegionGraph(std::move(units), std::move(edges), g.elections(), GraphCheck{false}),
          std::move(report)};
}

}  // namespace trecom
