#pragma once

#include <span>
#include <vector>

#include "trecom/graph.hpp"
#include "trecom/rng.hpp"

namespace trecom {

// Tree as a sorted list of RegionGraph edge indices.
using Tree = std::vector<EdgeIndex>;

// One tree per district; trees[d] spans district d.
struct SpanningForest {
  std::vector<Tree> trees;
  bool operator==(const SpanningForest&) const = default;
};

struct CutCandidate {
  EdgeIndex edge;
  double root_side_pop;   // component holding the region's smallest unit
  double other_side_pop;
};

// Uniform spanning tree of a connected multigraph via loop-erased random
// walks (Wilson). Parallel edges are chosen in proportion to multiplicity.
// Returns multigraph edge indices, sorted. Throws ValidationError when the
// multigraph is disconnected.
std::vector<int> wilson_ust(const Multigraph& mg, Rng& rng);

// Uniform hierarchy-respecting spanning tree of a connected region: a uniform
// tree on the county quotient multigraph (concrete cross edges), then a
// uniform tree inside every county fragment.
Tree hierarchical_tree_draw(const RegionGraph& g, std::span<const UnitIndex> region, Rng& rng);

// True iff `tree` spans `region` and its restriction to every county
// fragment of the region is a spanning tree of that fragment.
bool is_hierarchical_tree(const RegionGraph& g, std::span<const UnitIndex> region, const Tree& tree);

// Every tree edge whose removal leaves both sides within pop_tolerance of
// total_pop / num_districts. Linear in the region size; sorted by edge index.
std::vector<CutCandidate> balanced_cuts(const RegionGraph& g, std::span<const UnitIndex> region,
                                        const Tree& tree, double pop_tolerance, int num_districts,
                                        double total_pop);

struct TreeSplit {
  std::vector<UnitIndex> root_side_units;  // sorted; holds the region's smallest unit
  Tree root_side_tree;
  std::vector<UnitIndex> other_units;
  Tree other_tree;
};

// The two components of `tree` minus `cut`.
TreeSplit split_tree(const RegionGraph& g, std::span<const UnitIndex> region, const Tree& tree,
                     EdgeIndex cut);

// Graph edges with one endpoint in each district, sorted.
std::vector<EdgeIndex> connecting_edges(const RegionGraph& g, std::span<const UnitIndex> a,
                                        std::span<const UnitIndex> b);

}  // namespace trecom
