#pragma once

#include <span>
#include <string>
#include <vector>

#include "trecom/graph.hpp"

namespace trecom {

// Parameters of the tempered family P'_gamma(M) ∝ 1_C(M) ∏ tau(M_i) exp(-gamma w J(M)).
struct MeasureParams {
  double gamma = 0.0;
  double w = 0.0;
  double pop_tolerance = 0.01;
  int max_county_splits = 21;
  int num_districts = 14;
  // Interpolating family 1_C prod tau^(1-gamma) exp(-gamma w J) instead.
  // Demonstration only: every step needs tree counts of the new districts.
  bool interpolate_tree_weight = false;

  void validate() const;
};

// |pop - ideal| <= tolerance * ideal. Equality is feasible.
bool within_tolerance(double pop, double ideal, double tolerance);

struct ScoreBreakdown {
  double J = 0.0;
  std::vector<double> per_district_iso;  // perimeter^2 / area
  std::vector<double> per_district_pp;   // 4 pi / iso
  std::vector<double> log_tau;  // filled by score_plan(..., with_tree_counts) or for the interpolating family
  int splits = 0;
  bool constraint_ok = false;

  bool operator==(const ScoreBreakdown&) const = default;
};

// Perimeter of a district: shared lengths on edges leaving it plus the
// exterior perimeter of its units. Units are visited in ascending order so
// the floating-point result depends only on the unit set.
struct DistrictShape {
  double perimeter = 0.0;
  double area = 0.0;
  double iso() const { return perimeter * perimeter / area; }
};
DistrictShape district_shape(const RegionGraph& g, std::span<const UnitIndex> sorted_units,
                             std::span<const DistrictIndex> assignment);

// J, iso and Polsby-Popper per district. Throws ValidationError on a zero-area district.
ScoreBreakdown isoperimetric_score(const RegionGraph& g, const Plan& plan);

// Natural log of the spanning-tree count (matrix-tree theorem, LU with
// partial pivoting on a reduced Laplacian). Returns -inf when disconnected.
double log_tree_count(const Multigraph& mg);
double log_tree_count(const SubgraphView& view);

// log tau_hier: tree count of the county quotient multigraph times the tree
// counts of every county fragment. Throws ValidationError if the district is
// disconnected.
double log_hierarchical_tree_count(const RegionGraph& g, std::span<const UnitIndex> district);

enum class ViolationKind { Contiguity, Population, CountySplits, Traversal };

struct Violation {
  ViolationKind kind;
  int district = -1;  // -1 when plan-wide
  std::string detail;
};

struct ConstraintReport {
  bool ok = true;
  std::vector<Violation> violations;
};

// Counties whose units fall in two or more districts.
int count_county_splits(const RegionGraph& g, const Plan& plan);

ConstraintReport constraint_check(const RegionGraph& g, const Plan& plan, const MeasureParams& p);

enum class StateSpace { Plan, Forest };

// Unnormalized log density. Plan space: sum log tau_hier - gamma w J;
// forest space: -gamma w J. With interpolate_tree_weight the tree term is
// scaled by (1 - gamma) and the forest density gains -gamma sum log tau_hier.
// Either is -inf when a constraint fails.
double log_density(const RegionGraph& g, const Plan& plan, StateSpace space, const MeasureParams& p);

// Full breakdown, optionally with per-district log tau_hier.
ScoreBreakdown score_plan(const RegionGraph& g, const Plan& plan, const MeasureParams& p,
                          bool with_tree_counts = false);

}  // namespace trecom
