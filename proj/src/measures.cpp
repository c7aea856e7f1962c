#include "trecom/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "trecom/error.hpp"

namespace trecom {

void MeasureParams::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in [0, 1]");
  if (!(w >= 0.0)) throw ValidationError("compactness weight w must be >= 0");
  if (!(pop_tolerance > 0.0)) throw ValidationError("population tolerance must be > 0");
  if (max_county_splits < 0) throw ValidationError("max county splits must be >= 0");
  if (num_districts < 1) throw ValidationError("number of districts must be >= 1");
}

bool within_tolerance(double pop, double ideal, double tolerance) {
  return std::fabs(pop - ideal) <= tolerance * ideal;
}

DistrictShape district_shape(const RegionGraph& g, std::span<const UnitIndex> sorted_units,
                             std::span<const DistrictIndex> assignment) {
  DistrictShape s;
  if (sorted_units.empty()) return s;
  const DistrictIndex d = assignment[sorted_units.front()];
  for (UnitIndex u : sorted_units) {
    const Unit& unit = g.unit(u);
    s.area += unit.area;
    s.perimeter += unit.exterior_perimeter;
    for (const Incidence& inc : g.incident(u))
      if (assignment[inc.neighbor] != d) s.perimeter += g.edge(inc.edge).shared_length;
  }
  return s;
}

ScoreBreakdown isoperimetric_score(const RegionGraph& g, const Plan& plan) {
  ScoreBreakdown out;
  const auto districts = plan.district_units();
  for (int d = 0; d < plan.num_districts; ++d) {
    DistrictShape s = district_shape(g, districts[d], plan.assignment);
    if (!(s.area > 0.0)) throw ValidationError("district " + std::to_string(d) + " has zero area");
    const double iso = s.iso();
    out.per_district_iso.push_back(iso);
    out.per_district_pp.push_back(4.0 * std::numbers::pi / iso);
  }
  for (double iso : out.per_district_iso) out.J += iso;
  return out;
}

double log_tree_count(const Multigraph& mg) {
  const int n = mg.num_vertices;
  if (n <= 1) return 0.0;
  if (!is_connected(mg)) return -std::numeric_limits<double>::infinity();
  // Reduced Laplacian: drop vertex n-1.
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n - 1, n - 1);
  for (const auto& [a, b] : mg.edges) {
    if (a == b) continue;
    if (a < n - 1) lap(a, a) += 1.0;
    if (b < n - 1) lap(b, b) += 1.0;
    if (a < n - 1 && b < n - 1) {
      lap(a, b) -= 1.0;
      lap(b, a) -= 1.0;
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(lap);
  const Eigen::MatrixXd& m = lu.matrixLU();
  double log_det = 0.0;
  for (int i = 0; i < n - 1; ++i) log_det += std::log(std::fabs(m(i, i)));
  return log_det;
}

double log_tree_count(const SubgraphView& view) { return log_tree_count(view.as_multigraph()); }

double log_hierarchical_tree_count(const RegionGraph& g, std::span<const UnitIndex> district) {
  if (district.empty()) throw ValidationError("empty district");
  std::vector<UnitIndex> units(district.begin(), district.end());
  if (!is_connected(SubgraphView(g, units))) throw ValidationError("district is not contiguous");
  const auto fragments = county_fragments(g, units);
  double total = log_tree_count(quotient_multigraph(g, fragments));
  for (const Fragment& f : fragments) total += log_tree_count(SubgraphView(g, f.units));
  return total;
}

int count_county_splits(const RegionGraph& g, const Plan& plan) {
  std::vector<int> first(g.num_counties(), -1);
  std::vector<char> split(g.num_counties(), 0);
  for (std::size_t u = 0; u < plan.assignment.size(); ++u) {
    const CountyIndex c = g.county_of(static_cast<UnitIndex>(u));
    if (first[c] < 0)
      first[c] = plan.assignment[u];
    else if (first[c] != plan.assignment[u])
      split[c] = 1;
  }
  return static_cast<int>(std::count(split.begin(), split.end(), 1));
}

ConstraintReport constraint_check(const RegionGraph& g, const Plan& plan, const MeasureParams& p) {
  ConstraintReport rep;
  auto fail = [&](ViolationKind k, int d, std::string detail) {
    rep.ok = false;
    rep.violations.push_back({k, d, std::move(detail)});
  };
  if (plan.assignment.size() != g.num_units()) {
    fail(ViolationKind::Contiguity, -1, "plan does not assign every unit");
    return rep;
  }
  const auto districts = plan.district_units();
  const double ideal = g.total_population() / plan.num_districts;
  for (int d = 0; d < plan.num_districts; ++d) {
    if (districts[d].empty()) {
      fail(ViolationKind::Contiguity, d, "district is empty");
      continue;
    }
    SubgraphView view(g, districts[d]);
    if (!is_connected(view)) fail(ViolationKind::Contiguity, d, "district is not contiguous");
    const double pop = view.population();
    if (!within_tolerance(pop, ideal, p.pop_tolerance))
      fail(ViolationKind::Population, d,
           "population " + std::to_string(pop) + " vs ideal " + std::to_string(ideal));
    std::vector<int> per_county(g.num_counties(), 0);
    for (const Fragment& f : county_fragments(g, districts[d])) {
      if (++per_county[f.county] == 2)
        fail(ViolationKind::Traversal, d,
             "county " + g.county_name(f.county) + " is entered more than once");
    }
  }
  const int splits = count_county_splits(g, plan);
  if (splits > p.max_county_splits)
    fail(ViolationKind::CountySplits, -1,
         std::to_string(splits) + " split counties exceed " + std::to_string(p.max_county_splits));
  return rep;
}

double log_density(const RegionGraph& g, const Plan& plan, StateSpace space, const MeasureParams& p) {
  if (!constraint_check(g, plan, p).ok) return -std::numeric_limits<double>::infinity();
  const ScoreBreakdown s = isoperimetric_score(g, plan);
  double value = -p.gamma * p.w * s.J;
  double log_tau = 0.0;
  if (space == StateSpace::Plan || p.interpolate_tree_weight)
    for (const auto& units : plan.district_units()) log_tau += log_hierarchical_tree_count(g, units);
  if (space == StateSpace::Plan) value += p.interpolate_tree_weight ? (1.0 - p.gamma) * log_tau : log_tau;
  else if (p.interpolate_tree_weight) value -= p.gamma * log_tau;
  return value;
}

ScoreBreakdown score_plan(const RegionGraph& g, const Plan& plan, const MeasureParams& p,
                          bool with_tree_counts) {
  ScoreBreakdown s = isoperimetric_score(g, plan);
  s.splits = count_county_splits(g, plan);
  s.constraint_ok = constraint_check(g, plan, p).ok;
  if (with_tree_counts || p.interpolate_tree_weight) {
    for (const auto& units : plan.district_units()) {
      const bool connected = !units.empty() && is_connected(SubgraphView(g, units));
      s.log_tau.push_back(connected ? log_hierarchical_tree_count(g, units)
                                    : -std::numeric_limits<double>::infinity());
    }
  }
  return s;
}

}  // namespace trecom
