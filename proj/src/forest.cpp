#include "trecom/forest.hpp"

#include <algorithm>

#include "trecom/error.hpp"
#include "trecom/measures.hpp"
#include "detail/region_index.hpp"

namespace trecom {

using detail::RegionIndex;
using detail::fragment_labels;

std::vector<int> wilson_ust(const Multigraph& mg, Rng& rng) {
  const int n = mg.num_vertices;
  if (n <= 1) return {};
  if (!is_connected(mg)) throw ValidationError("cannot draw a spanning tree of a disconnected graph");
  const auto adj = mg.adjacency();
  std::vector<char> in_tree(n, 0);
  std::vector<Incidence> next(n, Incidence{-1, -1});
  std::vector<int> tree;
  tree.reserve(n - 1);
  in_tree[0] = 1;
  for (int start = 1; start < n; ++start) {
    int u = start;
    while (!in_tree[u]) {
      const auto& inc = adj[u];
      next[u] = inc[rng.uniform_index(inc.size())];
      u = next[u].neighbor;
    }
    u = start;
    while (!in_tree[u]) {
      in_tree[u] = 1;
      tree.push_back(next[u].edge);
      u = next[u].neighbor;
    }
  }
  std::sort(tree.begin(), tree.end());
  return tree;
}

Tree hierarchical_tree_draw(const RegionGraph& g, std::span<const UnitIndex> region, Rng& rng) {
  if (region.empty()) throw ValidationError("empty region");
  RegionIndex idx(g, region);
  int num_frags = 0;
  const std::vector<int> frag = fragment_labels(g, idx, num_frags);

  // Members of each fragment in local order, and per-fragment local index.
  std::vector<std::vector<UnitIndex>> members(num_frags);
  std::vector<int> pos_in_frag(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    pos_in_frag[i] = static_cast<int>(members[frag[i]].size());
    members[frag[i]].push_back(idx.units()[i]);
  }

  Multigraph quotient;
  quotient.num_vertices = num_frags;
  std::vector<Multigraph> inner(num_frags);
  for (int f = 0; f < num_frags; ++f) inner[f].num_vertices = static_cast<int>(members[f].size());

  for (std::size_t i = 0; i < idx.size(); ++i) {
    const UnitIndex u = idx.units()[i];
    for (const Incidence& inc : g.incident(u)) {
      const int j = idx.local(inc.neighbor);
      if (j < 0 || inc.neighbor < u) continue;
      if (frag[i] == frag[j]) {
        inner[frag[i]].edges.emplace_back(pos_in_frag[i], pos_in_frag[j]);
        inner[frag[i]].origin.push_back(inc.edge);
      } else {
        quotient.edges.emplace_back(frag[i], frag[j]);
        quotient.origin.push_back(inc.edge);
      }
    }
  }
  if (!is_connected(quotient)) throw ValidationError("region is not contiguous");

  Tree tree;
  tree.reserve(idx.size() - 1);
  for (int e : wilson_ust(quotient, rng)) tree.push_back(quotient.origin[e]);
  for (int f = 0; f < num_frags; ++f)
    for (int e : wilson_ust(inner[f], rng)) tree.push_back(inner[f].origin[e]);
  std::sort(tree.begin(), tree.end());
  return tree;
}

bool is_hierarchical_tree(const RegionGraph& g, std::span<const UnitIndex> region, const Tree& tree) {
  RegionIndex idx(g, region);
  if (tree.size() + 1 != idx.size()) return false;
  for (EdgeIndex e : tree) {
    const Edge& ed = g.edge(e);
    if (!idx.contains(ed.u) || !idx.contains(ed.v)) return false;
  }
  // Spanning: connected with n-1 edges.
  Multigraph mg;
  mg.num_vertices = static_cast<int>(idx.size());
  for (EdgeIndex e : tree) mg.edges.emplace_back(idx.local(g.edge(e).u), idx.local(g.edge(e).v));
  if (!is_connected(mg)) return false;
  // Restriction to each fragment must be a spanning tree of the fragment,
  // i.e. the fragment's units stay connected using only in-fragment tree edges.
  int num_frags = 0;
  const std::vector<int> frag = fragment_labels(g, idx, num_frags);
  std::vector<int> frag_size(num_frags, 0), frag_edges(num_frags, 0);
  for (std::size_t i = 0; i < idx.size(); ++i) ++frag_size[frag[i]];
  for (EdgeIndex e : tree) {
    const int a = frag[idx.local(g.edge(e).u)];
    const int b = frag[idx.local(g.edge(e).v)];
    if (a == b) ++frag_edges[a];
  }
  // An acyclic edge set with |f|-1 edges inside f spans f.
  for (int f = 0; f < num_frags; ++f)
    if (frag_edges[f] != frag_size[f] - 1) return false;
  return true;
}

std::vector<CutCandidate> balanced_cuts(const RegionGraph& g, std::span<const UnitIndex> region,
                                        const Tree& tree, double pop_tolerance, int num_districts,
                                        double total_pop) {
  RegionIndex idx(g, region);
  const std::size_t n = idx.size();
  std::vector<std::vector<Incidence>> adj(n);
  for (EdgeIndex e : tree) {
    const int a = idx.local(g.edge(e).u);
    const int b = idx.local(g.edge(e).v);
    adj[a].push_back({b, e});
    adj[b].push_back({a, e});
  }
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> parent(n, -1);
  std::vector<EdgeIndex> parent_edge(n, -1);
  std::vector<char> seen(n, 0);
  order.push_back(0);
  seen[0] = 1;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int x = order[k];
    for (const Incidence& inc : adj[x]) {
      if (seen[inc.neighbor]) continue;
      seen[inc.neighbor] = 1;
      parent[inc.neighbor] = x;
      parent_edge[inc.neighbor] = inc.edge;
      order.push_back(inc.neighbor);
    }
  }
  std::vector<double> sub(n);
  for (std::size_t i = 0; i < n; ++i) sub[i] = g.unit(idx.units()[i]).population;
  for (std::size_t k = n; k-- > 1;) sub[parent[order[k]]] += sub[order[k]];
  const double region_pop = sub[0];
  const double ideal = total_pop / num_districts;

  std::vector<CutCandidate> out;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const int v = order[k];
    const double below = sub[v];
    const double above = region_pop - below;
    if (within_tolerance(below, ideal, pop_tolerance) && within_tolerance(above, ideal, pop_tolerance))
      out.push_back({parent_edge[v], above, below});
  }
  std::sort(out.begin(), out.end(),
            [](const CutCandidate& a, const CutCandidate& b) { return a.edge < b.edge; });
  return out;
}

TreeSplit split_tree(const RegionGraph& g, std::span<const UnitIndex> region, const Tree& tree,
                     EdgeIndex cut) {
  RegionIndex idx(g, region);
  const std::size_t n = idx.size();
  std::vector<std::vector<int>> adj(n);
  for (EdgeIndex e : tree) {
    if (e == cut) continue;
    const int a = idx.local(g.edge(e).u);
    const int b = idx.local(g.edge(e).v);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> side(n, 0);
  std::vector<int> stack{0};
  side[0] = 1;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (int y : adj[x])
      if (!side[y]) {
        side[y] = 1;
        stack.push_back(y);
      }
  }
  TreeSplit out;
  for (std::size_t i = 0; i < n; ++i)
    (side[i] ? out.root_side_units : out.other_units).push_back(idx.units()[i]);
  for (EdgeIndex e : tree) {
    if (e == cut) continue;
    (side[idx.local(g.edge(e).u)] ? out.root_side_tree : out.other_tree).push_back(e);
  }
  return out;
}

std::vector<EdgeIndex> connecting_edges(const RegionGraph& g, std::span<const UnitIndex> a,
                                        std::span<const UnitIndex> b) {
  std::vector<char> in_b(g.num_units(), 0);
  for (UnitIndex u : b) in_b[u] = 1;
  std::vector<EdgeIndex> out;
  for (UnitIndex u : a)
    for (const Incidence& inc : g.incident(u))
      if (in_b[inc.neighbor]) out.push_back(inc.edge);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace trecom
