#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace trecom {

using UnitIndex = int;
using EdgeIndex = int;
using CountyIndex = int;
using DistrictIndex = int;

struct VoteCount {
  double dem = 0.0;
  double rep = 0.0;

  double total() const { return dem + rep; }
  VoteCount& operator+=(const VoteCount& o) {
    dem += o.dem;
    rep += o.rep;
    return *this;
  }
  bool operator==(const VoteCount&) const = default;
};

// One population unit (precinct, or a component of a multi-polygon precinct)
// as read from the graph file. `votes` is indexed by election position in the
// owning graph's election list.
struct Unit {
  std::string id;
  double population = 0.0;
  double area = 0.0;
  double exterior_perimeter = 0.0;
  std::string county;
  double bvap = 0.0;
  double tvap = 0.0;
  std::vector<VoteCount> votes;
  std::optional<std::string> mp_component;
};

struct Edge {
  UnitIndex u = 0;  // u < v
  UnitIndex v = 0;
  double shared_length = 0.0;

  UnitIndex other(UnitIndex x) const { return x == u ? v : u; }
};

struct Incidence {
  UnitIndex neighbor;
  EdgeIndex edge;
};

// Validation knobs for construction. Preprocessing works on raw graphs that
// may be disconnected before multi-polygon components are merged.
struct GraphCheck {
  bool require_connected = true;
};

// Attributed dual graph. Immutable after construction; every invariant is
// checked in the constructor.
class RegionGraph {
 public:
  RegionGraph(std::vector<Unit> units, std::vector<Edge> edges,
              std::vector<std::string> elections, GraphCheck check = {});

  std::size_t num_units() const { return units_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_counties() const { return county_names_.size(); }
  std::size_t num_elections() const { return elections_.size(); }

  const Unit& unit(UnitIndex u) const { return units_[u]; }
  const std::vector<Unit>& units() const { return units_; }
  const Edge& edge(EdgeIndex e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const Incidence> incident(UnitIndex u) const { return adjacency_[u]; }

  CountyIndex county_of(UnitIndex u) const { return county_of_[u]; }
  const std::string& county_name(CountyIndex c) const { return county_names_[c]; }

  const std::vector<std::string>& elections() const { return elections_; }
  // Position of an election id; throws ValidationError naming it if absent.
  std::size_t election_index(const std::string& id) const;

  // Throws ValidationError naming the id if unknown.
  UnitIndex index_of(const std::string& id) const;
  std::optional<UnitIndex> find(const std::string& id) const;

  // Edge joining u and v, if any.
  std::optional<EdgeIndex> edge_between(UnitIndex u, UnitIndex v) const;

  double total_population() const { return total_population_; }

 private:
  std::vector<Unit> units_;
  std::vector<Edge> edges_;
  std::vector<std::string> elections_;
  std::vector<std::vector<Incidence>> adjacency_;
  std::vector<CountyIndex> county_of_;
  std::vector<std::string> county_names_;
  std::unordered_map<std::string, UnitIndex> index_;
  double total_population_ = 0.0;
};

// Assignment of every unit to a district in [0, num_districts).
struct Plan {
  std::vector<DistrictIndex> assignment;
  int num_districts = 0;

  std::vector<std::vector<UnitIndex>> district_units() const;
  bool operator==(const Plan&) const = default;
};

// Checks every unit is assigned, every district is nonempty and connected.
// Throws ValidationError describing the first failure.
void validate_plan(const RegionGraph& g, const Plan& plan);

// Multigraph with explicit parallel edges. `origin` optionally maps each edge
// back to the RegionGraph edge it came from.
struct Multigraph {
  int num_vertices = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<EdgeIndex> origin;

  std::vector<std::vector<Incidence>> adjacency() const;
};

// Induced subgraph over a unit subset. Holds a reference to the parent graph.
class SubgraphView {
 public:
  SubgraphView(const RegionGraph& g, std::vector<UnitIndex> units);

  const RegionGraph& graph() const { return *graph_; }
  const std::vector<UnitIndex>& units() const { return units_; }
  std::size_t size() const { return units_.size(); }
  bool contains(UnitIndex u) const;
  // Position of u within units(), or -1.
  int local_index(UnitIndex u) const;
  // Parent edges with both endpoints in the view, ascending.
  const std::vector<EdgeIndex>& edges() const { return edges_; }

  double population() const;
  double area() const;

  // The view as a plain multigraph over local indices.
  Multigraph as_multigraph() const;

 private:
  const RegionGraph* graph_;
  std::vector<UnitIndex> units_;  // sorted, unique
  std::vector<EdgeIndex> edges_;
};

SubgraphView induced_subgraph(const RegionGraph& g, std::vector<UnitIndex> units);

bool is_connected(const SubgraphView& view);
bool is_connected(const Multigraph& mg);

// Connected pieces of a district restricted to each county.
struct Fragment {
  CountyIndex county;
  std::vector<UnitIndex> units;  // sorted
};

// Fragments ordered by county, then by smallest unit.
std::vector<Fragment> county_fragments(const RegionGraph& g, std::span<const UnitIndex> district);

// One vertex per fragment, one edge per original cross-fragment edge.
Multigraph quotient_multigraph(const RegionGraph& g, std::span<const Fragment> fragments);

// Graph file (JSON) and plan file (CSV) I/O.
RegionGraph load_graph(const std::filesystem::path& path, GraphCheck check = {});
RegionGraph parse_graph(const std::string& text, GraphCheck check = {});
std::string serialize_graph(const RegionGraph& g);
void save_graph(const RegionGraph& g, const std::filesystem::path& path);

Plan load_plan(const RegionGraph& g, const std::filesystem::path& path);
Plan parse_plan(const RegionGraph& g, const std::string& text);
void save_plan(const RegionGraph& g, const Plan& plan, const std::filesystem::path& path);

// Multi-polygon preprocessing.
struct MergeOptions {
  double pop_cap = 20000.0;
  // Absorb a component isolated in a foreign county into the neighbor sharing
  // the longest boundary instead of leaving it as its own node.
  bool absorb_county_isolated = false;
};

struct MergeDecision {
  std::string group;                 // mp_component tag
  std::string action;                // "merged", "split_over_cap", "isolated_kept", "isolated_absorbed"
  std::vector<std::string> members;  // unit ids forming the resulting node(s)
  double population = 0.0;
};

struct MergeResult {
  RegionGraph graph;
  std::vector<MergeDecision> report;
};

MergeResult merge_multipolygon_units(const RegionGraph& g, const MergeOptions& options = {});

}  // namespace trecom
