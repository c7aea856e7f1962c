#include "trecom/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "trecom/error.hpp"

namespace trecom {

std::vector<std::optional<double>> district_shares(const EnsembleRecord& r, std::size_t election) {
  if (election >= r.votes.size()) throw ValidationError("election index out of range");
  std::vector<std::optional<double>> out;
  for (const VoteCount& v : r.votes[election]) {
    if (v.total() > 0.0)
      out.emplace_back(v.dem / v.total());
    else
      out.emplace_back(std::nullopt);
  }
  return out;
}

std::vector<double> defined_shares(const EnsembleRecord& r, std::size_t election) {
  std::vector<double> out;
  const auto shares = district_shares(r, election);
  for (std::size_t d = 0; d < shares.size(); ++d) {
    if (!shares[d])
      throw ValidationError("plan " + std::to_string(r.plan_id) + " district " + std::to_string(d) +
                            " has no two-party votes");
    out.push_back(*shares[d]);
  }
  return out;
}

SeatCount seats_won(const std::vector<double>& shares) {
  SeatCount s;
  for (double x : shares) {
    if (std::isnan(x)) throw ValidationError("undefined vote share");
    if (x > 0.5) ++s.seats;
    if (x == 0.5) s.tie = true;
  }
  return s;
}

SeatCount seats_won(const std::vector<std::optional<double>>& shares) {
  std::vector<double> v;
  for (const auto& x : shares) {
    if (!x) throw ValidationError("undefined vote share");
    v.push_back(*x);
  }
  return seats_won(v);
}

double statewide_share(const EnsembleRecord& r, std::size_t election) {
  VoteCount total;
  for (const VoteCount& v : r.votes.at(election)) total += v;
  if (total.total() <= 0.0) throw ValidationError("election has no two-party votes");
  return total.dem / total.total();
}

std::vector<SeatHistogram> collected_seat_histogram(const std::vector<EnsembleRecord>& ensemble,
                                                    const std::vector<std::string>& election_ids,
                                                    const std::vector<std::size_t>& elections,
                                                    const EnsembleRecord* reference) {
  if (ensemble.empty()) throw ValidationError("ensemble is empty");
  std::vector<SeatHistogram> out;
  for (std::size_t e : elections) {
    SeatHistogram h;
    h.election = election_ids.at(e);
    h.statewide_share = statewide_share(reference ? *reference : ensemble.front(), e);
    h.counts.assign(ensemble.front().num_districts() + 1, 0);
    for (const EnsembleRecord& r : ensemble) {
      const SeatCount s = seats_won(district_shares(r, e));
      ++h.counts[s.seats];
      h.ties += s.tie;
    }
    if (reference) h.reference = seats_won(district_shares(*reference, e));
    out.push_back(std::move(h));
  }
  return out;
}

Responsiveness responsiveness_fraction(const std::vector<EnsembleRecord>& ensemble,
                                       const std::vector<std::size_t>& elections) {
  if (elections.size() < 2) throw ValidationError("responsiveness needs at least two elections");
  Responsiveness out;
  out.total = ensemble.size();
  for (const EnsembleRecord& r : ensemble) {
    const int first = seats_won(district_shares(r, elections.front())).seats;
    bool constant = true;
    for (std::size_t i = 1; i < elections.size() && constant; ++i)
      constant = seats_won(district_shares(r, elections[i])).seats == first;
    if (constant) {
      ++out.constant;
      out.plan_ids.push_back(r.plan_id);
    }
  }
  out.fraction = out.total ? static_cast<double>(out.constant) / static_cast<double>(out.total) : 0.0;
  return out;
}

std::vector<double> uniform_swing(const std::vector<double>& shares, double delta) {
  std::vector<double> out;
  for (double s : shares) out.push_back(std::clamp(s + delta, 0.0, 1.0));
  return out;
}

double swung_statewide_share(const std::vector<double>& shares, const std::vector<double>& totals) {
  double dem = 0.0, all = 0.0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    dem += shares[i] * totals[i];
    all += totals[i];
  }
  if (all <= 0.0) throw ValidationError("election has no two-party votes");
  return dem / all;
}

std::vector<double> unit_swing_shares(const RegionGraph& g, const Plan& plan, std::size_t election, double delta) {
  std::vector<double> dem(plan.num_districts, 0.0), all(plan.num_districts, 0.0);
  for (UnitIndex u = 0; u < static_cast<UnitIndex>(g.num_units()); ++u) {
    const VoteCount& v = g.unit(u).votes.at(election);
    if (v.total() <= 0.0) continue;
    const double share = std::clamp(v.dem / v.total() + delta, 0.0, 1.0);
    dem[plan.assignment[u]] += share * v.total();
    all[plan.assignment[u]] += v.total();
  }
  std::vector<double> out;
  for (int d = 0; d < plan.num_districts; ++d) {
    if (all[d] <= 0.0) throw ValidationError("district " + std::to_string(d) + " has no two-party votes");
    out.push_back(dem[d] / all[d]);
  }
  return out;
}

std::vector<double> swing_grid_for_targets(double statewide, double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw ValidationError("invalid swing grid");
  std::vector<double> out;
  const auto n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= n; ++i) out.push_back(lo + i * step - statewide);
  return out;
}

namespace {

std::vector<double> district_totals(const EnsembleRecord& r, std::size_t election) {
  std::vector<double> t;
  for (const VoteCount& v : r.votes.at(election)) t.push_back(v.total());
  return t;
}

}  // namespace

std::vector<SwingRow> swing_sweep(const std::vector<EnsembleRecord>& ensemble, std::size_t election,
                                  const EnsembleRecord& reference, const std::vector<double>& deltas) {
  if (deltas.empty()) throw ValidationError("swing grid is empty");
  const int k = reference.num_districts();
  std::vector<std::vector<double>> shares;
  for (const EnsembleRecord& r : ensemble) shares.push_back(defined_shares(r, election));
  const std::vector<double> ref_shares = defined_shares(reference, election);
  std::vector<SwingRow> out;
  for (double delta : deltas) {
    SwingRow row;
    row.delta = delta;
    const std::vector<double> ref_swung = uniform_swing(ref_shares, delta);
    row.statewide_share = swung_statewide_share(ref_swung, district_totals(reference, election));
    row.counts.assign(k + 1, 0);
    for (const auto& s : shares) ++row.counts[seats_won(uniform_swing(s, delta)).seats];
    row.reference = seats_won(ref_swung);
    out.push_back(std::move(row));
  }
  return out;
}

WindowFraction swing_window_fraction(const std::vector<SwingRow>& rows, double lo, double hi) {
  WindowFraction w;
  for (const SwingRow& row : rows) {
    if (row.statewide_share < lo || row.statewide_share > hi || !row.reference) continue;
    for (std::size_t s = 0; s < row.counts.size(); ++s) {
      w.total += row.counts[s];
      if (static_cast<int>(s) <= row.reference->seats) w.at_most_reference += row.counts[s];
    }
  }
  w.fraction = w.total ? static_cast<double>(w.at_most_reference) / static_cast<double>(w.total) : 0.0;
  return w;
}

double quantile_type7(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<std::vector<double>> rank_quantiles(const std::vector<std::vector<double>>& per_plan_values,
                                                const std::vector<double>& quantiles) {
  if (per_plan_values.empty()) throw ValidationError("ensemble is empty");
  const std::size_t k = per_plan_values.front().size();
  std::vector<std::vector<double>> by_rank(k);
  for (std::vector<double> v : per_plan_values) {
    if (v.size() != k) throw ValidationError("plans have different district counts");
    std::sort(v.begin(), v.end());
    for (std::size_t r = 0; r < k; ++r) by_rank[r].push_back(v[r]);
  }
  std::vector<std::vector<double>> out(k);
  for (std::size_t r = 0; r < k; ++r)
    for (double q : quantiles) out[r].push_back(quantile_type7(by_rank[r], q));
  return out;
}

std::vector<double> ranked_shares(const EnsembleRecord& r, std::size_t election) {
  std::vector<double> s = defined_shares(r, election);
  std::sort(s.begin(), s.end());
  return s;
}

std::vector<std::vector<double>> rank_ordered_marginals(const std::vector<EnsembleRecord>& ensemble,
                                                        std::size_t election, const std::vector<double>& quantiles) {
  std::vector<std::vector<double>> values;
  for (const EnsembleRecord& r : ensemble) values.push_back(defined_shares(r, election));
  return rank_quantiles(values, quantiles);
}

namespace {

// District indices in ascending share order, ties by index.
std::vector<DistrictIndex> rank_order(const EnsembleRecord& r, std::size_t election) {
  const std::vector<double> s = defined_shares(r, election);
  std::vector<DistrictIndex> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s[a] < s[b]; });
  return order;
}

double rank_dem_votes(const EnsembleRecord& r, std::size_t election, const std::vector<DistrictIndex>& order,
                      const std::vector<int>& ranks) {
  double sum = 0.0;
  for (int rank : ranks) sum += r.votes[election][order[rank - 1]].dem;
  return sum;
}

}  // namespace

PolarizationStats polarization_stats(const std::vector<EnsembleRecord>& ensemble, std::size_t election,
                                     const EnsembleRecord& reference, const std::vector<int>& low_ranks,
                                     const std::vector<int>& high_ranks) {
  const int k = reference.num_districts();
  for (const auto* ranks : {&low_ranks, &high_ranks})
    for (int rank : *ranks)
      if (rank < 1 || rank > k) throw ValidationError("rank " + std::to_string(rank) + " outside 1.." + std::to_string(k));
  const auto ref_order = rank_order(reference, election);
  const double ref_low = rank_dem_votes(reference, election, ref_order, low_ranks);
  const double ref_high = rank_dem_votes(reference, election, ref_order, high_ranks);
  PolarizationStats out;
  out.total = ensemble.size();
  for (const EnsembleRecord& r : ensemble) {
    const auto order = rank_order(r, election);
    out.low_count += rank_dem_votes(r, election, order, low_ranks) <= ref_low;
    out.high_count += rank_dem_votes(r, election, order, high_ranks) >= ref_high;
  }
  if (out.total) {
    out.low_fraction = static_cast<double>(out.low_count) / static_cast<double>(out.total);
    out.high_fraction = static_cast<double>(out.high_count) / static_cast<double>(out.total);
  }
  return out;
}

std::vector<int> RankSelector::ranks(int num_districts) const {
  if (count < 1 || count > num_districts) throw ValidationError("selector count outside 1..K");
  std::vector<int> out;
  if (kind == Kind::TopDemocratic)
    for (int r = num_districts - count + 1; r <= num_districts; ++r) out.push_back(r);
  else
    for (int r = 1; r <= count; ++r) out.push_back(r);
  return out;
}

std::vector<DistrictIndex> selected_districts(const EnsembleRecord& r, std::size_t election,
                                              const RankSelector& selector) {
  const auto order = rank_order(r, election);
  std::vector<DistrictIndex> out;
  for (int rank : selector.ranks(r.num_districts())) out.push_back(order[rank - 1]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> district_frequency_map(const std::vector<EnsembleRecord>& ensemble,
                                           const std::vector<std::size_t>& elections, const RankSelector& selector) {
  if (ensemble.empty()) throw ValidationError("ensemble is empty");
  if (elections.empty()) throw ValidationError("no elections selected");
  const std::size_t n = ensemble.front().assignment.size();
  std::vector<double> freq(n, 0.0);
  std::vector<char> chosen;
  for (const EnsembleRecord& r : ensemble) {
    if (r.assignment.size() != n) throw ValidationError("records cover different unit counts");
    for (std::size_t e : elections) {
      chosen.assign(r.num_districts(), 0);
      for (DistrictIndex d : selected_districts(r, e, selector)) chosen[d] = 1;
      for (std::size_t u = 0; u < n; ++u) freq[u] += chosen[r.assignment[u]];
    }
  }
  const double pairs = static_cast<double>(ensemble.size() * elections.size());
  for (double& f : freq) f /= pairs;
  return freq;
}

std::vector<TailShare> tail_share_comparison(const std::vector<EnsembleRecord>& ensemble, std::size_t election,
                                             const EnsembleRecord& reference, const RankSelector& selector) {
  if (ensemble.empty()) throw ValidationError("ensemble is empty");
  const std::vector<double> ref = ranked_shares(reference, election);
  std::vector<std::vector<double>> ranked;
  for (const EnsembleRecord& r : ensemble) ranked.push_back(ranked_shares(r, election));
  std::vector<TailShare> out;
  for (int rank : selector.ranks(reference.num_districts())) {
    TailShare t;
    t.rank = rank;
    t.reference_share = ref[rank - 1];
    std::uint64_t le = 0, lt = 0;
    for (const auto& s : ranked) {
      le += s[rank - 1] <= t.reference_share;
      lt += s[rank - 1] < t.reference_share;
    }
    t.fraction_le = static_cast<double>(le) / static_cast<double>(ranked.size());
    t.fraction_lt = static_cast<double>(lt) / static_cast<double>(ranked.size());
    out.push_back(t);
  }
  return out;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ValidationError("KS statistic needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

ConvergenceReport convergence_compare(const std::vector<std::vector<EnsembleRecord>>& streams, std::size_t election,
                                      double threshold) {
  if (streams.size() < 2) throw ValidationError("convergence comparison needs at least two streams");
  std::vector<std::vector<std::vector<double>>> by_rank;  // [stream][rank][plan]
  for (const auto& stream : streams) {
    if (stream.empty()) throw ValidationError("convergence stream is empty");
    std::vector<std::vector<double>> ranks(stream.front().num_districts());
    for (const EnsembleRecord& r : stream) {
      const auto s = ranked_shares(r, election);
      if (s.size() != ranks.size()) throw ValidationError("streams have different district counts");
      for (std::size_t k = 0; k < s.size(); ++k) ranks[k].push_back(s[k]);
    }
    by_rank.push_back(std::move(ranks));
  }
  ConvergenceReport out;
  out.threshold = threshold;
  const std::size_t k = by_rank.front().size();
  for (const auto& s : by_rank)
    if (s.size() != k) throw ValidationError("streams have different district counts");
  out.per_rank.assign(k, 0.0);
  for (std::size_t a = 0; a < streams.size(); ++a)
    for (std::size_t b = a + 1; b < streams.size(); ++b)
      for (std::size_t r = 0; r < k; ++r)
        out.per_rank[r] = std::max(out.per_rank[r], ks_statistic(by_rank[a][r], by_rank[b][r]));
  out.max_distance = *std::max_element(out.per_rank.begin(), out.per_rank.end());
  out.passes = out.max_distance < threshold;
  return out;
}

std::optional<double> vra_c_for_pair(const VoteCount& b, const VoteCount& nb, double bvap, double tvap,
                                     double tolerance) {
  if (!(tvap > 0.0)) throw ValidationError("voting-age population is zero or missing");
  if (nb.total() <= 0.0 || b.total() <= 0.0) return std::nullopt;
  const double d_prime = nb.dem / nb.total() * b.total();
  const double black = bvap * b.total() / tvap;
  const double denom = d_prime - black;
  if (std::fabs(denom) <= tolerance * std::max(1.0, b.total())) return std::nullopt;
  return (b.dem - black) / denom;
}

VraEstimate vra_estimate_c(const RegionGraph& g, const std::vector<UnitIndex>& scope,
                           const std::set<std::string>& black_candidate) {
  for (const std::string& id : black_candidate) g.election_index(id);  // throws naming a missing id
  std::vector<UnitIndex> units = scope;
  if (units.empty()) {
    units.resize(g.num_units());
    std::iota(units.begin(), units.end(), 0);
  }
  std::vector<VoteCount> totals(g.num_elections());
  double bvap = 0.0, tvap = 0.0;
  for (UnitIndex u : units) {
    const Unit& unit = g.unit(u);
    bvap += unit.bvap;
    tvap += unit.tvap;
    for (std::size_t e = 0; e < g.num_elections(); ++e) totals[e] += unit.votes[e];
  }
  std::vector<std::size_t> black, other;
  for (std::size_t e = 0; e < g.num_elections(); ++e)
    (black_candidate.count(g.elections()[e]) ? black : other).push_back(e);
  if (black.empty() || other.empty())
    throw ValidationError("crossover estimate needs black-candidate and other elections");
  VraEstimate out;
  std::vector<double> cs;
  for (std::size_t b : black)
    for (std::size_t nb : other) {
      const auto c = vra_c_for_pair(totals[b], totals[nb], bvap, tvap);
      if (c)
        cs.push_back(*c);
      else
        out.skipped.push_back(g.elections()[b] + "/" + g.elections()[nb]);
    }
  out.pairs_used = cs.size();
  if (cs.empty()) throw ValidationError("every election pair had a vanishing crossover denominator");
  for (double c : cs) out.c_mean += c;
  out.c_mean /= static_cast<double>(cs.size());
  if (cs.size() > 1) {
    double ss = 0.0;
    for (double c : cs) ss += (c - out.c_mean) * (c - out.c_mean);
    out.c_std = std::sqrt(ss / static_cast<double>(cs.size() - 1));
  }
  return out;
}

void VraModel::validate() const {
  if (required_districts < 0) throw ValidationError("required districts must be >= 0");
  if (min_passing_elections < 0) throw ValidationError("minimum passing elections must be >= 0");
  if (bvap_floor && !(*bvap_floor >= 0.0 && *bvap_floor <= 1.0))
    throw ValidationError("BVAP floor must lie in [0, 1]");
}

bool vra_primary_condition(double B, double D) { return 2.0 * B > D; }

bool vra_general_condition(double B, double D, double R, double c) {
  return B + c * (D - B) > R + (1.0 - c) * (D - B);
}

bool vra_plan_passes(const EnsembleRecord& r, const std::vector<std::string>& election_ids, const VraModel& model) {
  if (model.required_districts == 0) return true;
  const int k = r.num_districts();
  std::vector<char> is_black(election_ids.size(), 0);
  for (const std::string& id : model.black_candidate) {
    auto it = std::find(election_ids.begin(), election_ids.end(), id);
    if (it == election_ids.end()) throw ValidationError("unknown election \"" + id + "\"");
    is_black[it - election_ids.begin()] = 1;
  }
  int qualifying = 0;
  for (int d = 0; d < k; ++d) {
    if (!(r.tvap[d] > 0.0)) throw ValidationError("district " + std::to_string(d) + " lacks voting-age population");
    if (model.bvap_floor && r.bvap[d] / r.tvap[d] < *model.bvap_floor) continue;
    int passing = 0;
    bool all_black = true;
    for (std::size_t e = 0; e < election_ids.size(); ++e) {
      const VoteCount& v = r.votes[e][d];
      const double B = r.bvap[d] * v.total() / r.tvap[d];
      const bool ok = vra_primary_condition(B, v.dem) && vra_general_condition(B, v.dem, v.rep, model.c);
      passing += ok;
      if (is_black[e] && !ok) all_black = false;
    }
    if (all_black && passing >= model.min_passing_elections) ++qualifying;
  }
  return qualifying >= model.required_districts;
}

VraScreenResult vra_screen(const std::vector<EnsembleRecord>& ensemble, const std::vector<std::string>& election_ids,
                           const VraModel& model) {
  model.validate();
  VraScreenResult out;
  out.total = ensemble.size();
  for (const EnsembleRecord& r : ensemble)
    if (vra_plan_passes(r, election_ids, model)) out.passing.push_back(r.plan_id);
  return out;
}

}  // namespace trecom
