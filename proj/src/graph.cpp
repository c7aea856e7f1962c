#include "trecom/graph.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "trecom/error.hpp"

namespace trecom {

RegionGraph::RegionGraph(std::vector<Unit> units, std::vector<Edge> edges,
                         std::vector<std::string> elections, GraphCheck check)
    : units_(std::move(units)), edges_(std::move(edges)), elections_(std::move(elections)) {
  if (units_.empty()) throw ValidationError("graph has no units");

  std::map<std::string, CountyIndex> counties;
  for (std::size_t i = 0; i < units_.size(); ++i) {
    const Unit& u = units_[i];
    if (!index_.emplace(u.id, static_cast<UnitIndex>(i)).second)
      throw ValidationError("duplicate unit id \"" + u.id + "\"");
    if (!(u.population >= 0.0))
      throw ValidationError("unit \"" + u.id + "\" has negative population");
    if (!(u.area > 0.0)) throw ValidationError("unit \"" + u.id + "\" has non-positive area");
    if (!(u.exterior_perimeter >= 0.0))
      throw ValidationError("unit \"" + u.id + "\" has negative exterior perimeter");
    if (!(u.bvap >= 0.0) || !(u.tvap >= 0.0) || u.bvap > u.tvap)
      throw ValidationError("unit \"" + u.id + "\" violates 0 <= bvap <= tvap");
    if (u.votes.size() != elections_.size())
      throw ValidationError("unit \"" + u.id + "\" does not cover every election");
    for (std::size_t e = 0; e < u.votes.size(); ++e) {
      if (!(u.votes[e].dem >= 0.0) || !(u.votes[e].rep >= 0.0))
        throw ValidationError("unit \"" + u.id + "\" has negative votes in " + elections_[e]);
    }
    counties.emplace(u.county, 0);
    total_population_ += u.population;
  }
  CountyIndex next = 0;
  for (auto& [name, idx] : counties) {
    idx = next++;
    county_names_.push_back(name);
  }
  county_of_.reserve(units_.size());
  for (const Unit& u : units_) county_of_.push_back(counties.at(u.county));

  adjacency_.resize(units_.size());
  std::set<std::pair<UnitIndex, UnitIndex>> seen;
  const auto n = static_cast<UnitIndex>(units_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    Edge& ed = edges_[e];
    if (ed.u < 0 || ed.u >= n || ed.v < 0 || ed.v >= n)
      throw ValidationError("edge " + std::to_string(e) + " references a missing unit");
    if (ed.u == ed.v) throw ValidationError("self-loop edge at unit \"" + units_[ed.u].id + "\"");
    if (ed.u > ed.v) std::swap(ed.u, ed.v);
    if (!(ed.shared_length >= 0.0))
      throw ValidationError("edge " + units_[ed.u].id + "-" + units_[ed.v].id +
                            " has negative shared length");
    if (!seen.emplace(ed.u, ed.v).second)
      throw ValidationError("duplicate edge " + units_[ed.u].id + "-" + units_[ed.v].id);
    adjacency_[ed.u].push_back({ed.v, static_cast<EdgeIndex>(e)});
    adjacency_[ed.v].push_back({ed.u, static_cast<EdgeIndex>(e)});
  }

  if (check.require_connected) {
    std::vector<UnitIndex> all(units_.size());
    for (UnitIndex i = 0; i < n; ++i) all[i] = i;
    if (!is_connected(SubgraphView(*this, std::move(all))))
      throw ValidationError("graph is disconnected");
  }
}

std::size_t RegionGraph::election_index(const std::string& id) const {
  auto it = std::find(elections_.begin(), elections_.end(), id);
  if (it == elections_.end()) throw ValidationError("unknown election \"" + id + "\"");
  return static_cast<std::size_t>(it - elections_.begin());
}

UnitIndex RegionGraph::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ValidationError("unknown unit id \"" + id + "\"");
  return it->second;
}

std::optional<UnitIndex> RegionGraph::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeIndex> RegionGraph::edge_between(UnitIndex u, UnitIndex v) const {
  for (const Incidence& inc : adjacency_[u])
    if (inc.neighbor == v) return inc.edge;
  return std::nullopt;
}

std::vector<std::vector<UnitIndex>> Plan::district_units() const {
  std::vector<std::vector<UnitIndex>> out(num_districts);
  for (std::size_t u = 0; u < assignment.size(); ++u)
    out[assignment[u]].push_back(static_cast<UnitIndex>(u));
  return out;
}

void validate_plan(const RegionGraph& g, const Plan& plan) {
  if (plan.num_districts <= 0) throw ValidationError("plan has no districts");
  if (plan.assignment.size() != g.num_units())
    throw ValidationError("plan assigns " + std::to_string(plan.assignment.size()) +
                          " units, graph has " + std::to_string(g.num_units()));
  for (std::size_t u = 0; u < plan.assignment.size(); ++u) {
    const int d = plan.assignment[u];
    if (d < 0 || d >= plan.num_districts)
      throw ValidationError("unit \"" + g.unit(static_cast<UnitIndex>(u)).id +
                            "\" has out-of-range district " + std::to_string(d));
  }
  auto districts = plan.district_units();
  for (int d = 0; d < plan.num_districts; ++d) {
    if (districts[d].empty()) throw ValidationError("district " + std::to_string(d) + " is empty");
    if (!is_connected(SubgraphView(g, std::move(districts[d]))))
      throw ValidationError("district " + std::to_string(d) + " is not contiguous");
  }
}

std::vector<std::vector<Incidence>> Multigraph::adjacency() const {
  std::vector<std::vector<Incidence>> adj(num_vertices);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    adj[edges[e].first].push_back({edges[e].second, static_cast<EdgeIndex>(e)});
    adj[edges[e].second].push_back({edges[e].first, static_cast<EdgeIndex>(e)});
  }
  return adj;
}

SubgraphView::SubgraphView(const RegionGraph& g, std::vector<UnitIndex> units)
    : graph_(&g), units_(std::move(units)) {
  if (units_.empty()) throw ValidationError("empty unit set");
  std::sort(units_.begin(), units_.end());
  units_.erase(std::unique(units_.begin(), units_.end()), units_.end());
  if (units_.front() < 0 || units_.back() >= static_cast<UnitIndex>(g.num_units()))
    throw ValidationError("unit index out of range");
  for (UnitIndex u : units_) {
    for (const Incidence& inc : g.incident(u)) {
      if (inc.neighbor > u && contains(inc.neighbor)) edges_.push_back(inc.edge);
    }
  }
  std::sort(edges_.begin(), edges_.end());
}

bool SubgraphView::contains(UnitIndex u) const {
  return std::binary_search(units_.begin(), units_.end(), u);
}

int SubgraphView::local_index(UnitIndex u) const {
  auto it = std::lower_bound(units_.begin(), units_.end(), u);
  if (it == units_.end() || *it != u) return -1;
  return static_cast<int>(it - units_.begin());
}

double SubgraphView::population() const {
  double s = 0.0;
  for (UnitIndex u : units_) s += graph_->unit(u).population;
  return s;
}

double SubgraphView::area() const {
  double s = 0.0;
  for (UnitIndex u : units_) s += graph_->unit(u).area;
  return s;
}

Multigraph SubgraphView::as_multigraph() const {
  Multigraph mg;
  mg.num_vertices = static_cast<int>(units_.size());
  mg.edges.reserve(edges_.size());
  for (EdgeIndex e : edges_) {
    const Edge& ed = graph_->edge(e);
    mg.edges.emplace_back(local_index(ed.u), local_index(ed.v));
    mg.origin.push_back(e);
  }
  return mg;
}

SubgraphView induced_subgraph(const RegionGraph& g, std::vector<UnitIndex> units) {
  return SubgraphView(g, std::move(units));
}

bool is_connected(const Multigraph& mg) {
  if (mg.num_vertices <= 1) return true;
  const auto adj = mg.adjacency();
  std::vector<char> seen(mg.num_vertices, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (const Incidence& inc : adj[x]) {
      if (!seen[inc.neighbor]) {
        seen[inc.neighbor] = 1;
        ++reached;
        stack.push_back(inc.neighbor);
      }
    }
  }
  return reached == mg.num_vertices;
}

bool is_connected(const SubgraphView& view) {
  const RegionGraph& g = view.graph();
  const auto& units = view.units();
  std::vector<char> seen(units.size(), 0);
  std::vector<UnitIndex> stack{units.front()};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    UnitIndex x = stack.back();
    stack.pop_back();
    for (const Incidence& inc : g.incident(x)) {
      int li = view.local_index(inc.neighbor);
      if (li >= 0 && !seen[li]) {
        seen[li] = 1;
        ++reached;
        stack.push_back(inc.neighbor);
      }
    }
  }
  return reached == units.size();
}

std::vector<Fragment> county_fragments(const RegionGraph& g, std::span<const UnitIndex> district) {
  std::vector<UnitIndex> sorted(district.begin(), district.end());
  std::sort(sorted.begin(), sorted.end());
  auto member = [&](UnitIndex u) { return std::binary_search(sorted.begin(), sorted.end(), u); };

  std::vector<Fragment> out;
  std::set<UnitIndex> visited;
  for (UnitIndex start : sorted) {
    if (visited.count(start)) continue;
    const CountyIndex c = g.county_of(start);
    Fragment frag{c, {}};
    std::vector<UnitIndex> stack{start};
    visited.insert(start);
    while (!stack.empty()) {
      UnitIndex x = stack.back();
      stack.pop_back();
      frag.units.push_back(x);
      for (const Incidence& inc : g.incident(x)) {
        UnitIndex y = inc.neighbor;
        if (g.county_of(y) == c && member(y) && visited.insert(y).second) stack.push_back(y);
      }
    }
    std::sort(frag.units.begin(), frag.units.end());
    out.push_back(std::move(frag));
  }
  std::stable_sort(out.begin(), out.end(), [](const Fragment& a, const Fragment& b) {
    return a.county != b.county ? a.county < b.county : a.units.front() < b.units.front();
  });
  return out;
}

Multigraph quotient_multigraph(const RegionGraph& g, std::span<const Fragment> fragments) {
  std::unordered_map<UnitIndex, int> frag_of;
  for (std::size_t f = 0; f < fragments.size(); ++f)
    for (UnitIndex u : fragments[f].units) frag_of.emplace(u, static_cast<int>(f));

  Multigraph mg;
  mg.num_vertices = static_cast<int>(fragments.size());
  std::vector<EdgeIndex> cross;
  for (const auto& [u, fu] : frag_of) {
    for (const Incidence& inc : g.incident(u)) {
      if (inc.neighbor <= u) continue;
      auto it = frag_of.find(inc.neighbor);
      if (it != frag_of.end() && it->second != fu) cross.push_back(inc.edge);
    }
  }
  std::sort(cross.begin(), cross.end());
  for (EdgeIndex e : cross) {
    const Edge& ed = g.edge(e);
    mg.edges.emplace_back(frag_of.at(ed.u), frag_of.at(ed.v));
    mg.origin.push_back(e);
  }
  return mg;
}

}  // namespace trecom
