#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "trecom/analysis.hpp"
#include "trecom/error.hpp"
#include "trecom/rng.hpp"

using namespace trecom;
using namespace trecom::testing;

namespace {

// Record with one entry per election; votes[e][d] = (d, r).
EnsembleRecord record(const std::vector<std::vector<std::pair<double, double>>>& votes, std::uint64_t id = 0) {
  EnsembleRecord r;
  r.plan_id = id;
  const std::size_t k = votes.front().size();
  r.population.assign(k, 1.0);
  r.bvap.assign(k, 0.0);
  r.tvap.assign(k, 1.0);
  for (const auto& election : votes) {
    std::vector<VoteCount> row;
    for (auto [d, rep] : election) row.push_back({d, rep});
    r.votes.push_back(row);
  }
  return r;
}

// One election; share s in district i as (100 s, 100 (1 - s)).
EnsembleRecord shares_record(const std::vector<double>& shares, std::uint64_t id = 0) {
  std::vector<std::pair<double, double>> row;
  for (double s : shares) row.emplace_back(100 * s, 100 * (1 - s));
  return record({row}, id);
}

}  // namespace

TEST_CASE("district_shares examples") {
  const EnsembleRecord r = record({{{60, 40}, {0, 100}, {0, 0}}});
  const auto s = district_shares(r, 0);
  CHECK(*s[0] == doctest::Approx(0.6));
  CHECK(*s[1] == 0.0);
  CHECK_FALSE(s[2].has_value());
  try {
    defined_shares(r, 0);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("seats_won examples") {
  CHECK(seats_won(std::vector<double>{0.4, 0.6, 0.55}).seats == 2);
  CHECK(seats_won(std::vector<double>{0.1, 0.2, 0.49}).seats == 0);
  const SeatCount tie = seats_won(std::vector<double>{0.5});
  CHECK(tie.seats == 0);
  CHECK(tie.tie);
  CHECK_THROWS_AS(seats_won(std::vector<std::optional<double>>{0.7, std::nullopt}), ValidationError);
}

TEST_CASE("collected_seat_histogram") {
  // Three hand-built plans, two elections, K = 3.
  const std::vector<EnsembleRecord> ens = {
      record({{{60, 40}, {30, 70}, {55, 45}}, {{40, 60}, {30, 70}, {20, 80}}}, 0),
      record({{{60, 40}, {60, 40}, {55, 45}}, {{40, 60}, {51, 49}, {20, 80}}}, 1),
      record({{{10, 90}, {30, 70}, {50, 50}}, {{40, 60}, {30, 70}, {20, 80}}}, 2)};
  const auto h = collected_seat_histogram(ens, {"E1", "E2"}, {0, 1}, &ens[0]);
  REQUIRE(h.size() == 2);
  CHECK(h[0].counts == std::vector<std::uint64_t>{1, 0, 1, 1});
  CHECK(h[0].ties == 1);
  CHECK(h[0].reference->seats == 2);
  CHECK(h[1].counts == std::vector<std::uint64_t>{2, 1, 0, 0});
  CHECK(h[0].statewide_share == doctest::Approx(145.0 / 300));

  const auto single = collected_seat_histogram({ens[1]}, {"E1", "E2"}, {0}, nullptr);
  CHECK(single[0].counts == std::vector<std::uint64_t>{0, 0, 0, 1});
  CHECK_FALSE(single[0].reference.has_value());
}

TEST_CASE("responsiveness_fraction") {
  const std::vector<EnsembleRecord> ens = {
      record({{{60, 40}, {30, 70}}, {{70, 30}, {20, 80}}, {{40, 60}, {30, 70}}}, 0),
      record({{{60, 40}, {30, 70}}, {{70, 30}, {20, 80}}, {{55, 45}, {30, 70}}}, 1)};
  const Responsiveness two = responsiveness_fraction(ens, {0, 1});
  CHECK(two.constant == 2);
  CHECK(two.fraction == 1.0);
  const Responsiveness three = responsiveness_fraction(ens, {0, 1, 2});
  CHECK(three.constant == 1);
  CHECK(three.plan_ids == std::vector<std::uint64_t>{1});
  CHECK(three.fraction <= two.fraction);
  CHECK_THROWS_AS(responsiveness_fraction(ens, {0}), ValidationError);
}

TEST_CASE("responsiveness is non-increasing as elections are added") {
  Rng rng(1);
  std::vector<EnsembleRecord> ens;
  for (int p = 0; p < 200; ++p) {
    std::vector<std::vector<std::pair<double, double>>> v(6);
    for (auto& e : v)
      for (int d = 0; d < 4; ++d) {
        const double s = 0.3 + 0.4 * rng.uniform01();
        e.emplace_back(s, 1 - s);
      }
    ens.push_back(record(v, p));
  }
  double prev = 1.0;
  for (std::size_t n = 2; n <= 6; ++n) {
    std::vector<std::size_t> es(n);
    std::iota(es.begin(), es.end(), 0);
    const double f = responsiveness_fraction(ens, es).fraction;
    CHECK(f <= prev);
    prev = f;
  }
}

TEST_CASE("uniform_swing examples") {
  CHECK(uniform_swing({0.3, 0.7}, 0.0) == std::vector<double>{0.3, 0.7});
  const auto s = uniform_swing({0.45, 0.55}, 0.06);
  CHECK(s[0] == doctest::Approx(0.51));
  CHECK(s[1] == doctest::Approx(0.61));
  CHECK(seats_won(std::vector<double>{0.45, 0.55}).seats == 1);
  CHECK(seats_won(s).seats == 2);
  CHECK(seats_won(uniform_swing({0.45, 0.45}, 0.06)).seats == 2);
  CHECK(seats_won(std::vector<double>{0.45, 0.45}).seats == 0);
  CHECK(uniform_swing({0.98}, 0.05) == std::vector<double>{1.0});
  CHECK(uniform_swing({0.02}, -0.05) == std::vector<double>{0.0});
  CHECK(swung_statewide_share({0.5, 1.0}, {100, 300}) == doctest::Approx(350.0 / 400));
}

TEST_CASE("seats are monotone in the swing") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> shares(6);
    for (double& s : shares) s = rng.uniform01();
    int prev = -1;
    for (double delta = -0.5; delta <= 0.5; delta += 0.01) {
      const int seats = seats_won(uniform_swing(shares, delta)).seats;
      CHECK(seats >= prev);
      prev = seats;
    }
  }
}

TEST_CASE("unit swing agrees with district swing when nothing clips") {
  const RegionGraph g = make_grid(2, 2, {}, {"E"});
  const Plan plan = make_plan({0, 0, 1, 1}, 2);
  // Uniform unit shares of 0.5 and equal turnout.
  const auto unit = unit_swing_shares(g, plan, 0, 0.07);
  const auto district = uniform_swing({0.5, 0.5}, 0.07);
  CHECK(unit[0] == doctest::Approx(district[0]));
  CHECK(unit[1] == doctest::Approx(district[1]));
}

TEST_CASE("swing grid and sweep") {
  const auto grid = swing_grid_for_targets(0.47);
  CHECK(grid.size() == 41);
  CHECK(grid.front() == doctest::Approx(-0.07));
  CHECK(grid.back() == doctest::Approx(0.13));

  // Identical districts: seats jump from 0 to K at one grid point.
  const EnsembleRecord same = shares_record({0.48, 0.48, 0.48});
  const auto rows = swing_sweep({same}, 0, same, {-0.01, 0.0, 0.01, 0.02, 0.03});
  std::vector<int> seats;
  for (const SwingRow& r : rows) {
    int s = 0;
    for (std::size_t i = 0; i < r.counts.size(); ++i)
      if (r.counts[i]) s = static_cast<int>(i);
    seats.push_back(s);
  }
  CHECK(seats == std::vector<int>{0, 0, 0, 0, 3});
  CHECK(rows[1].statewide_share == doctest::Approx(0.48));

  // Window fraction pools (plan, grid point) pairs.
  const EnsembleRecord ref = shares_record({0.40, 0.52, 0.56});
  const std::vector<EnsembleRecord> ens = {shares_record({0.45, 0.50, 0.53}), shares_record({0.49, 0.49, 0.50})};
  const auto sweep = swing_sweep(ens, 0, ref, {0.0, 0.04});
  const WindowFraction wf = swing_window_fraction(sweep, 0.0, 1.0);
  CHECK(wf.total == 4);
  // delta 0: reference 2 seats, plans 1 and 0. delta .04: reference 2, plans 2 and 3.
  CHECK(wf.at_most_reference == 3);
  const WindowFraction none = swing_window_fraction(sweep, 0.9, 1.0);
  CHECK(none.total == 0);
}

TEST_CASE("quantiles and rank marginals") {
  CHECK(quantile_type7({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile_type7({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile_type7({5}, 0.9) == 5);

  const std::vector<EnsembleRecord> two = {shares_record({0.4, 0.6}), shares_record({0.8, 0.2})};
  const auto m = rank_ordered_marginals(two, 0);
  REQUIRE(m.size() == 2);
  CHECK(m[0][3] == doctest::Approx(0.3));
  CHECK(m[1][3] == doctest::Approx(0.7));

  const std::vector<EnsembleRecord> same(5, shares_record({0.3, 0.9, 0.5}));
  for (const auto& row : rank_ordered_marginals(same, 0))
    for (double q : row) CHECK(q == row.front());

  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> raw(5);
    for (double& s : raw) s = rng.uniform01();
    const auto ranked = ranked_shares(shares_record(raw), 0);
    CHECK(std::is_sorted(ranked.begin(), ranked.end()));
    auto sorted = raw;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < raw.size(); ++k) CHECK(ranked[k] == doctest::Approx(sorted[k]));
  }
}

TEST_CASE("polarization_stats") {
  // K = 4, low ranks {1, 2}, high ranks {4}.
  const EnsembleRecord ref = shares_record({0.3, 0.4, 0.6, 0.7});
  const std::vector<EnsembleRecord> ens = {shares_record({0.3, 0.4, 0.5, 0.8}), shares_record({0.35, 0.4, 0.5, 0.6}),
                                           shares_record({0.2, 0.3, 0.6, 0.9})};
  const PolarizationStats p = polarization_stats(ens, 0, ref, {1, 2}, {4});
  CHECK(p.total == 3);
  CHECK(p.low_count == 2);   // 70 <= 70, 75 > 70, 50 <= 70
  CHECK(p.high_count == 2);  // 80 >= 70, 60 < 70, 90 >= 70
  CHECK(p.low_fraction == doctest::Approx(2.0 / 3));
  CHECK_THROWS_AS(polarization_stats(ens, 0, ref, {1}, {5}), ValidationError);

  // Median reference of a symmetric ensemble: both fractions near one half.
  Rng rng(4);
  std::vector<EnsembleRecord> many;
  for (int i = 0; i < 2001; ++i) {
    std::vector<double> s(4);
    for (double& x : s) x = rng.uniform01();
    many.push_back(shares_record(s, i));
  }
  std::vector<std::pair<double, std::size_t>> low;
  for (std::size_t i = 0; i < many.size(); ++i) {
    const auto r = ranked_shares(many[i], 0);
    low.emplace_back(r[0] + r[1], i);
  }
  std::nth_element(low.begin(), low.begin() + 1000, low.end());
  const PolarizationStats med = polarization_stats(many, 0, many[low[1000].second], {1, 2}, {3, 4});
  CHECK(med.low_fraction == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("selectors, frequency maps, tail shares") {
  RankSelector top{RankSelector::Kind::TopDemocratic, 2};
  CHECK(top.ranks(5) == std::vector<int>{4, 5});
  RankSelector rep{RankSelector::Kind::MostRepublican, 1};
  CHECK(rep.ranks(5) == std::vector<int>{1});

  // 2x2 grid: district 0 = {0,1}, district 1 = {2,3}.
  EnsembleRecord r = shares_record({0.7, 0.2});
  r.assignment = {0, 0, 1, 1};
  CHECK(selected_districts(r, 0, rep) == std::vector<DistrictIndex>{1});
  const auto freq = district_frequency_map({r}, {0}, RankSelector{RankSelector::Kind::TopDemocratic, 1});
  CHECK(freq == std::vector<double>{1, 1, 0, 0});

  EnsembleRecord r2 = shares_record({0.1, 0.9});
  r2.assignment = {0, 1, 1, 1};
  const auto f2 = district_frequency_map({r, r2}, {0}, RankSelector{RankSelector::Kind::TopDemocratic, 1});
  // Counting identity: each plan contributes its selected-district size.
  double total = 0;
  for (double f : f2) {
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    total += f * 2;
  }
  CHECK(total == doctest::Approx(2 + 3));

  const EnsembleRecord ref = shares_record({0.2, 0.8});
  const std::vector<EnsembleRecord> ens = {shares_record({0.3, 0.7}), shares_record({0.2, 0.8}),
                                           shares_record({0.1, 0.9})};
  const auto tail = tail_share_comparison(ens, 0, ref, RankSelector{RankSelector::Kind::TopDemocratic, 1});
  REQUIRE(tail.size() == 1);
  CHECK(tail[0].rank == 2);
  CHECK(tail[0].fraction_le == doctest::Approx(2.0 / 3));
  CHECK(tail[0].fraction_lt == doctest::Approx(1.0 / 3));
}

TEST_CASE("tail share of a reference drawn from the ensemble is uniform") {
  Rng rng(5);
  std::vector<EnsembleRecord> ens;
  for (int i = 0; i < 400; ++i) ens.push_back(shares_record({0.5 * rng.uniform01(), 0.5 + 0.5 * rng.uniform01()}, i));
  std::vector<int> bins(4, 0);
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    const EnsembleRecord& ref = ens[rng.uniform_index(ens.size())];
    const auto tail = tail_share_comparison(ens, 0, ref, RankSelector{RankSelector::Kind::TopDemocratic, 1});
    ++bins[std::min(3, static_cast<int>(tail[0].fraction_lt * 4))];
  }
  for (int b : bins) CHECK(std::fabs(b / static_cast<double>(trials) - 0.25) < 0.08);
}

TEST_CASE("ks_statistic and convergence_compare") {
  CHECK(ks_statistic({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_statistic({1, 2}, {3, 4}) == 1.0);
  CHECK(ks_statistic({1, 2, 3, 4}, {3, 4, 5, 6}) == doctest::Approx(0.5));

  std::vector<EnsembleRecord> s;
  for (int i = 0; i < 10; ++i) s.push_back(shares_record({0.1 * i, 0.5}));
  const ConvergenceReport self = convergence_compare({s, s}, 0);
  CHECK(self.max_distance == 0.0);
  CHECK(self.passes);
  std::vector<EnsembleRecord> shifted;
  for (int i = 0; i < 10; ++i) shifted.push_back(shares_record({0.1 * i + 0.55, 0.5}));
  const ConvergenceReport far = convergence_compare({s, shifted}, 0);
  CHECK(far.max_distance > 0.5);
  CHECK_FALSE(far.passes);
}

TEST_CASE("vra_c_for_pair identities") {
  // Equal shares and no black voters: c = 1.
  CHECK(*vra_c_for_pair({60, 40}, {30, 20}, 0.0, 100.0) == doctest::Approx(1.0));
  // All Democratic votes black (B = D_b) with D' > B: c = 0.
  // D_b = 40, R_b = 60 -> B = bvap * 100 / tvap = 40 with bvap/tvap = 0.4;
  // nb share 0.6 -> D' = 60 > 40.
  CHECK(*vra_c_for_pair({40, 60}, {60, 40}, 40.0, 100.0) == doctest::Approx(0.0));
  // Vanishing denominator.
  CHECK_FALSE(vra_c_for_pair({40, 60}, {40, 60}, 40.0, 100.0).has_value());
}

TEST_CASE("c = 1 general condition reduces to D > R") {
  Rng rng(6);
  for (int i = 0; i < 10000; ++i) {
    const double B = 100 * rng.uniform01(), D = 100 * rng.uniform01(), R = 100 * rng.uniform01();
    if (std::fabs(D - R) < 1e-9) continue;
    CHECK(vra_general_condition(B, D, R, 1.0) == (D > R));
  }
  CHECK(vra_primary_condition(30, 50));
  CHECK_FALSE(vra_primary_condition(25, 50));
}

TEST_CASE("vra_estimate_c recovers a planted coefficient") {
  // Two units, elections B1 (black candidate) and N1. Statewide B = 0.3 *
  // turnout; the b election is built from the nb share with c = 0.8.
  const double c = 0.8;
  const double T = 1000, bvap = 300, tvap = 1000;
  const double nb_share = 0.55;
  const double B = bvap * T / tvap;
  const double Dp = nb_share * T;
  const double Db = B + c * (Dp - B);
  std::vector<Unit> units(2);
  for (int i = 0; i < 2; ++i) {
    units[i].id = i ? "u1" : "u0";
    units[i].population = 1;
    units[i].area = 1;
    units[i].county = "C";
    units[i].bvap = bvap / 2;
    units[i].tvap = tvap / 2;
    units[i].votes = {{Db / 2, (T - Db) / 2}, {nb_share * 400 / 2, (1 - nb_share) * 400 / 2}};
  }
  const RegionGraph g(units, {{0, 1, 1.0}}, {"B1", "N1"});
  const VraEstimate est = vra_estimate_c(g, {}, {"B1"});
  CHECK(est.pairs_used == 1);
  CHECK(std::fabs(est.c_mean - c) < 1e-9);
  CHECK(est.c_std == 0.0);
  CHECK_THROWS_AS(vra_estimate_c(g, {}, {"XX"}), ValidationError);
  CHECK_THROWS_AS(vra_estimate_c(g, {}, {"B1", "N1"}), ValidationError);
}

TEST_CASE("vra screen rules") {
  // K = 2, elections B (black candidate), N1, N2.
  auto make = [](std::vector<std::vector<std::pair<double, double>>> v, double bvap0) {
    EnsembleRecord r = record(v);
    r.bvap = {bvap0, 0.1};
    r.tvap = {1.0, 1.0};
    return r;
  };
  const std::vector<std::string> ids{"B", "N1", "N2"};
  // District 0: 100 voters, B = 60 * bvap share; D = 70 > R = 30.
  const EnsembleRecord good = make({{{70, 30}, {10, 90}}, {{70, 30}, {10, 90}}, {{70, 30}, {10, 90}}}, 0.6);
  VraModel m;
  m.black_candidate = {"B"};
  m.required_districts = 1;
  m.min_passing_elections = 3;
  CHECK(vra_plan_passes(good, ids, m));
  // Fails the black-candidate election in district 0.
  const EnsembleRecord bad_b = make({{{40, 60}, {10, 90}}, {{70, 30}, {10, 90}}, {{70, 30}, {10, 90}}}, 0.6);
  m.min_passing_elections = 2;
  CHECK_FALSE(vra_plan_passes(bad_b, ids, m));
  // Fails only a non-black election: passes with min 2, not with min 3.
  const EnsembleRecord bad_nb = make({{{70, 30}, {10, 90}}, {{40, 60}, {10, 90}}, {{70, 30}, {10, 90}}}, 0.6);
  CHECK(vra_plan_passes(bad_nb, ids, m));
  m.min_passing_elections = 3;
  CHECK_FALSE(vra_plan_passes(bad_nb, ids, m));
  // Floor.
  m.bvap_floor = 0.65;
  CHECK_FALSE(vra_plan_passes(good, ids, m));
  m.bvap_floor = 0.45;
  CHECK(vra_plan_passes(good, ids, m));

  VraModel zero = m;
  zero.required_districts = 0;
  CHECK(vra_screen({good, bad_b, bad_nb}, ids, zero).passing.size() == 3);
  VraModel impossible = m;
  impossible.min_passing_elections = 4;
  CHECK(vra_screen({good, bad_b, bad_nb}, ids, impossible).passing.empty());

  VraModel unknown = m;
  unknown.black_candidate = {"ZZ"};
  CHECK_THROWS_AS(vra_plan_passes(good, ids, unknown), ValidationError);
  VraModel neg = m;
  neg.bvap_floor = 1.5;
  CHECK_THROWS_AS(neg.validate(), ValidationError);
}

TEST_CASE("ensemble records round-trip") {
  const RegionGraph g = make_grid(2, 3, {"A", "A", "B"}, {"E1", "E2"});
  const Plan plan = make_plan({0, 0, 1, 0, 1, 1}, 2);
  const EnsembleRecord r = make_record(g, plan, 7);
  CHECK(r.population == std::vector<double>{3, 3});
  CHECK(r.votes[1][0].dem == 3);
  CHECK(r.splits == 1);
  CHECK(parse_record(serialize_record(r), 2) == r);
  const auto runs = rle_encode(plan.assignment);
  CHECK(runs.size() == 4);
  CHECK(rle_decode(runs) == plan.assignment);
  CHECK(score_csv_header(2) == "plan_id,J,splits,pp_rank1,pp_rank2");
}
