#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "trecom/graph.hpp"

namespace trecom::detail {

// Maps graph units to positions in a sorted region.
class RegionIndex {
 public:
  RegionIndex(const RegionGraph& g, std::span<const UnitIndex> region)
      : units_(region.begin(), region.end()), local_(g.num_units(), -1) {
    std::sort(units_.begin(), units_.end());
    for (std::size_t i = 0; i < units_.size(); ++i) local_[units_[i]] = static_cast<int>(i);
  }
  int local(UnitIndex u) const { return local_[u]; }
  bool contains(UnitIndex u) const { return local_[u] >= 0; }
  const std::vector<UnitIndex>& units() const { return units_; }
  std::size_t size() const { return units_.size(); }

 private:
  std::vector<UnitIndex> units_;
  std::vector<int> local_;
};

// Fragment id (local) for every region unit: components of region ∩ county.
inline std::vector<int> fragment_labels(const RegionGraph& g, const RegionIndex& idx, int& count) {
  std::vector<int> label(idx.size(), -1);
  count = 0;
  std::vector<UnitIndex> stack;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (label[i] >= 0) continue;
    const UnitIndex start = idx.units()[i];
    const CountyIndex c = g.county_of(start);
    label[i] = count;
    stack.push_back(start);
    while (!stack.empty()) {
      UnitIndex x = stack.back();
      stack.pop_back();
      for (const Incidence& inc : g.incident(x)) {
        const int li = idx.local(inc.neighbor);
        if (li >= 0 && label[li] < 0 && g.county_of(inc.neighbor) == c) {
          label[li] = count;
          stack.push_back(inc.neighbor);
        }
      }
    }
    ++count;
  }
  return label;
}

}  // namespace trecom::detail
