#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trecom/ensemble.hpp"
#include "trecom/graph.hpp"

namespace trecom {

// Two-party Democratic share d / (d + r) per district; nullopt where d + r = 0.
std::vector<std::optional<double>> district_shares(const EnsembleRecord& r, std::size_t election);
// Same, throwing ValidationError naming the district when a share is undefined.
std::vector<double> defined_shares(const EnsembleRecord& r, std::size_t election);

struct SeatCount {
  int seats = 0;
  bool tie = false;  // some share equals 0.5 exactly (counted as not Democratic)
};

// Shares strictly above 0.5. Throws ValidationError on an undefined share.
SeatCount seats_won(const std::vector<std::optional<double>>& shares);
SeatCount seats_won(const std::vector<double>& shares);

// Democratic fraction of all two-party votes in the record.
double statewide_share(const EnsembleRecord& r, std::size_t election);

struct SeatHistogram {
  std::string election;
  double statewide_share = 0.0;
  std::vector<std::uint64_t> counts;  // counts[s] = plans electing s Democrats
  std::uint64_t ties = 0;             // plans with an exact 0.5 district
  std::optional<SeatCount> reference;
};

std::vector<SeatHistogram> collected_seat_histogram(const std::vector<EnsembleRecord>& ensemble,
                                                    const std::vector<std::string>& election_ids,
                                                    const std::vector<std::size_t>& elections,
                                                    const EnsembleRecord* reference);

struct Responsiveness {
  std::uint64_t constant = 0;  // plans whose seat count is the same in every election
  std::uint64_t total = 0;
  double fraction = 0.0;
  std::vector<std::uint64_t> plan_ids;
};
Responsiveness responsiveness_fraction(const std::vector<EnsembleRecord>& ensemble,
                                       const std::vector<std::size_t>& elections);

// Shares shifted by delta and clipped to [0, 1].
std::vector<double> uniform_swing(const std::vector<double>& shares, double delta);
// Statewide share from per-district shares and fixed district two-party totals.
double swung_statewide_share(const std::vector<double>& shares, const std::vector<double>& totals);
// Per-unit alternative: each unit's share is shifted and clipped, then
// re-aggregated with fixed unit turnout. Agrees with uniform_swing when no
// clipping occurs.
std::vector<double> unit_swing_shares(const RegionGraph& g, const Plan& plan, std::size_t election, double delta);

struct SwingRow {
  double delta = 0.0;
  double statewide_share = 0.0;  // reference plan's swung statewide share
  std::vector<std::uint64_t> counts;
  std::optional<SeatCount> reference;
};

// Deltas moving `statewide` to every target in [lo, hi] with the given step.
std::vector<double> swing_grid_for_targets(double statewide, double lo = 0.40, double hi = 0.60,
                                           double step = 0.005);

std::vector<SwingRow> swing_sweep(const std::vector<EnsembleRecord>& ensemble, std::size_t election,
                                  const EnsembleRecord& reference, const std::vector<double>& deltas);

// Fraction of (plan, grid point) pairs with swung statewide share in
// [lo, hi] whose seat count is at most the reference's.
struct WindowFraction {
  std::uint64_t at_most_reference = 0;
  std::uint64_t total = 0;
  double fraction = 0.0;
};
WindowFraction swing_window_fraction(const std::vector<SwingRow>& rows, double lo, double hi);

inline const std::vector<double> kDefaultQuantiles = {0.025, 0.10, 0.25, 0.50, 0.75, 0.90, 0.975};

// Linear interpolation between order statistics (type 7).
double quantile_type7(std::vector<double> values, double q);

// rows[r][i] = quantile i of the (r+1)-th smallest value per plan.
std::vector<std::vector<double>> rank_quantiles(const std::vector<std::vector<double>>& per_plan_values,
                                                const std::vector<double>& quantiles = kDefaultQuantiles);

std::vector<std::vector<double>> rank_ordered_marginals(const std::vector<EnsembleRecord>& ensemble,
                                                        std::size_t election,
                                                        const std::vector<double>& quantiles = kDefaultQuantiles);

// Per-plan ascending shares.
std::vector<double> ranked_shares(const EnsembleRecord& r, std::size_t election);

struct PolarizationStats {
  std::uint64_t low_count = 0;   // plans with low-rank Democratic votes <= reference
  std::uint64_t high_count = 0;  // plans with high-rank Democratic votes >= reference
  std::uint64_t total = 0;
  double low_fraction = 0.0;
  double high_fraction = 0.0;
};

// Ranks are 1-based positions in ascending Democratic share.
PolarizationStats polarization_stats(const std::vector<EnsembleRecord>& ensemble, std::size_t election,
                                     const EnsembleRecord& reference, const std::vector<int>& low_ranks = {5, 6, 7, 8, 9},
                                     const std::vector<int>& high_ranks = {10, 11, 12});

struct RankSelector {
  enum class Kind { TopDemocratic, MostRepublican } kind = Kind::TopDemocratic;
  int count = 3;
  // 1-based ascending ranks selected for a plan with K districts.
  std::vector<int> ranks(int num_districts) const;
};

// Districts of `r` at the selector's ranks (ties broken by district index).
std::vector<DistrictIndex> selected_districts(const EnsembleRecord& r, std::size_t election,
                                              const RankSelector& selector);

// Per-unit fraction of (plan, election) pairs placing the unit in a selected district.
std::vector<double> district_frequency_map(const std::vector<EnsembleRecord>& ensemble,
                                           const std::vector<std::size_t>& elections, const RankSelector& selector);

struct TailShare {
  int rank = 0;               // 1-based ascending rank
  double reference_share = 0.0;
  double fraction_le = 0.0;   // ensemble share at this rank <= reference
  double fraction_lt = 0.0;   // ensemble share at this rank < reference
};
std::vector<TailShare> tail_share_comparison(const std::vector<EnsembleRecord>& ensemble, std::size_t election,
                                             const EnsembleRecord& reference, const RankSelector& selector);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

struct ConvergenceReport {
  std::vector<double> per_rank;  // max over stream pairs
  double max_distance = 0.0;
  double threshold = 0.02;
  bool passes = false;
};
ConvergenceReport convergence_compare(const std::vector<std::vector<EnsembleRecord>>& streams, std::size_t election,
                                      double threshold = 0.02);

// Crossover coefficient from one black-candidate election b and one other
// election nb, aggregated over a scope. D' rescales nb's two-party share to
// b's turnout; B = BVAP (D_b + R_b) / TVAP; c = (D_b - B) / (D' - B).
std::optional<double> vra_c_for_pair(const VoteCount& b, const VoteCount& nb, double bvap, double tvap,
                                     double tolerance = 1e-9);

struct VraEstimate {
  double c_mean = 0.0;
  double c_std = 0.0;  // sample standard deviation; 0 with one pair
  std::size_t pairs_used = 0;
  std::vector<std::string> skipped;  // "b/nb" pairs with a vanishing denominator
};

// Over all (black-candidate, other) election pairs aggregated on `scope`
// (every unit when empty).
VraEstimate vra_estimate_c(const RegionGraph& g, const std::vector<UnitIndex>& scope,
                           const std::set<std::string>& black_candidate);

struct VraModel {
  double c = 1.0;
  int required_districts = 4;
  int min_passing_elections = 14;
  std::optional<double> bvap_floor;
  std::set<std::string> black_candidate = {"18GOV", "18INS", "20USS"};

  void validate() const;
};

// 2B > D and B + c (D - B) > R + (1 - c)(D - B).
bool vra_primary_condition(double B, double D);
bool vra_general_condition(double B, double D, double R, double c);

struct VraScreenResult {
  std::vector<std::uint64_t> passing;
  std::uint64_t total = 0;
};

VraScreenResult vra_screen(const std::vector<EnsembleRecord>& ensemble, const std::vector<std::string>& election_ids,
                           const VraModel& model);
bool vra_plan_passes(const EnsembleRecord& r, const std::vector<std::string>& election_ids, const VraModel& model);

}  // namespace trecom
