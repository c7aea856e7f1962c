// Acceptance suite: one PASS/FAIL line per primary criterion. Tolerances are
// fixed below; a failing criterion is reported, never retuned.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "trecom/analysis.hpp"
#include "trecom/chain.hpp"
#include "trecom/cli.hpp"
#include "trecom/config.hpp"
#include "trecom/forest.hpp"
#include "trecom/tempering.hpp"

using namespace trecom;
using namespace trecom::testing;
namespace fs = std::filesystem;

namespace {

constexpr double kTreeCountTol = 1e-9;
constexpr double kChiSquareMinP = 1e-3;
constexpr double kTvTol = 0.02;
constexpr double kBalanceSigmas = 3.0;
constexpr double kSymbolicTol = 1e-12;
constexpr double kPlantedCTol = 1e-9;
constexpr int kMatrixTreeGraphs = 200;
constexpr int kUstDraws = 100000;
constexpr std::uint64_t kChainSteps = 1000000;
constexpr std::uint64_t kLadderSteps = 400000;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Canonical plan key -> index into an enumerated plan list.
struct PlanIndex {
  std::map<std::vector<int>, std::size_t> index;
  explicit PlanIndex(const std::vector<Plan>& plans) {
    for (std::size_t i = 0; i < plans.size(); ++i) index[canonical(plans[i])] = i;
  }
  std::size_t operator()(const Plan& p) const { return index.at(canonical(p)); }
};

std::vector<double> normalise(const std::vector<double>& counts) {
  double z = 0;
  for (double c : counts) z += c;
  std::vector<double> out(counts);
  for (double& c : out) c /= z;
  return out;
}

// ---------------------------------------------------------------------------

Outcome matrix_tree() {
  Rng rng(101);
  double worst = 0;
  for (int i = 0; i < kMatrixTreeGraphs; ++i) {
    const int n = 1 + static_cast<int>(rng.uniform_index(8));
    const Multigraph mg = random_connected_multigraph(n, static_cast<int>(rng.uniform_index(7)), rng);
    const double expected = std::log(static_cast<double>(enumerate_spanning_trees(mg).size()));
    worst = std::max(worst, std::fabs(log_tree_count(mg) - expected));
  }
  return {worst < kTreeCountTol,
          std::to_string(kMatrixTreeGraphs) + " graphs, max |log error| = " + fmt("%.2e", worst)};
}

Outcome ust_uniformity() {
  struct Case {
    std::string name;
    Multigraph mg;
  };
  std::vector<Case> cases = {
      {"triangle", {3, {{0, 1}, {1, 2}, {0, 2}}, {}}},
      {"C4", {4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, {}}},
      {"2x3 grid", {6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {0, 3}, {1, 4}, {2, 5}}, {}}},
      {"2 parallel edges", {2, {{0, 1}, {0, 1}}, {}}},
  };
  Outcome out;
  Rng rng(202);
  for (const Case& c : cases) {
    const auto trees = enumerate_spanning_trees(c.mg);
    std::map<std::vector<int>, std::size_t> index;
    for (std::size_t i = 0; i < trees.size(); ++i) index[trees[i]] = i;
    std::vector<double> counts(trees.size(), 0);
    bool unknown = false;
    for (int d = 0; d < kUstDraws; ++d) {
      std::vector<int> tree = wilson_ust(c.mg, rng);
      std::sort(tree.begin(), tree.end());
      const auto it = index.find(tree);
      if (it == index.end())
        unknown = true;
      else
        ++counts[it->second];
    }
    const double expected = static_cast<double>(kUstDraws) / static_cast<double>(trees.size());
    double chi2 = 0;
    for (double k : counts) chi2 += (k - expected) * (k - expected) / expected;
    const boost::math::chi_squared dist(static_cast<double>(trees.size() - 1));
    const double p = boost::math::cdf(boost::math::complement(dist, chi2));
    out.pass = out.pass && !unknown && p > kChiSquareMinP;
    out.detail += c.name + " (" + std::to_string(trees.size()) + " trees) p=" + fmt("%.3f", p) + "; ";
  }
  return out;
}

// One long chain on the oracle instance: plan frequencies and plan-level
// transition counts.
struct ChainTally {
  std::vector<double> visits;
  std::vector<std::vector<double>> moves;  // moves[x][y], x != y
};

ChainTally run_oracle_chain(const RegionGraph& g, const MeasureParams& p, const std::vector<Plan>& plans,
                            std::uint64_t seed) {
  const PlanIndex index(plans);
  Rng rng(seed);
  RecomChain chain(g, p, make_initial_state(g, plans[0], p, rng));
  ChainTally t;
  t.visits.assign(plans.size(), 0);
  t.moves.assign(plans.size(), std::vector<double>(plans.size(), 0));
  std::size_t cur = index(chain.state().plan);
  for (std::uint64_t s = 0; s < kChainSteps; ++s) {
    chain.step(rng);
    const std::size_t next = index(chain.state().plan);
    t.visits[cur] += 1;
    if (next != cur) t.moves[cur][next] += 1;
    cur = next;
  }
  return t;
}

struct OracleRuns {
  RegionGraph g = oracle_grid();
  std::vector<std::pair<double, double>> settings = {{0.0, 0.0}, {1.0, 0.5}};
  std::vector<std::vector<Plan>> plans;
  std::vector<std::vector<double>> exact;
  std::vector<ChainTally> tallies;

  OracleRuns() {
    for (auto [gamma, w] : settings) {
      const MeasureParams p = oracle_params(gamma, w);
      plans.push_back(enumerate_two_district_plans(g, p));
      exact.push_back(exact_distribution(g, plans.back(), p));
      tallies.push_back(run_oracle_chain(g, p, plans.back(), 303));
    }
  }
};

Outcome sampler_exactness(const OracleRuns& runs) {
  Outcome out;
  // The county structure must make the hierarchical count differ from the flat one.
  bool differs = false;
  for (const Plan& plan : runs.plans[0])
    for (const auto& units : plan.district_units())
      differs |= std::fabs(log_hierarchical_tree_count(runs.g, units) -
                           log_tree_count(induced_subgraph(runs.g, units))) > 1e-9;
  out.pass = differs && runs.plans[0].size() >= 5;
  out.detail = std::to_string(runs.plans[0].size()) + " feasible plans, tau_hier != tau_flat: " +
               (differs ? "yes" : "no") + "; ";
  for (std::size_t s = 0; s < runs.settings.size(); ++s) {
    const double tv = total_variation(normalise(runs.tallies[s].visits), runs.exact[s]);
    out.pass = out.pass && tv < kTvTol;
    out.detail += "(gamma,w)=(" + fmt("%g", runs.settings[s].first) + "," + fmt("%g", runs.settings[s].second) +
                  ") TV=" + fmt("%.4f", tv) + "; ";
  }
  return out;
}

// Plan-level detailed balance: P(x->y) / P(y->x) = pi(y) / pi(x), with
// P(x->y) estimated as moves / visits and a binomial standard error.
Outcome detailed_balance(const OracleRuns& runs) {
  Outcome out;
  for (std::size_t s = 0; s < runs.settings.size(); ++s) {
    const ChainTally& t = runs.tallies[s];
    const MeasureParams p = oracle_params(runs.settings[s].first, runs.settings[s].second);
    std::vector<double> logpi;
    for (const Plan& plan : runs.plans[s]) logpi.push_back(log_density(runs.g, plan, StateSpace::Plan, p));
    int pairs = 0;
    double worst = 0;
    bool one_sided = false;
    for (std::size_t x = 0; x < t.visits.size(); ++x)
      for (std::size_t y = x + 1; y < t.visits.size(); ++y) {
        const double nxy = t.moves[x][y], nyx = t.moves[y][x];
        if (nxy == 0 && nyx == 0) continue;
        if (nxy == 0 || nyx == 0) {
          one_sided = true;
          continue;
        }
        const double pxy = nxy / t.visits[x], pyx = nyx / t.visits[y];
        const double observed = std::log(pxy) - std::log(pyx);
        const double expected = logpi[y] - logpi[x];
        const double se = std::sqrt((1 - pxy) / nxy + (1 - pyx) / nyx);
        worst = std::max(worst, std::fabs(observed - expected) / se);
        ++pairs;
      }
    out.pass = out.pass && !one_sided && pairs > 0 && worst < kBalanceSigmas;
    out.detail += "(gamma,w)=(" + fmt("%g", runs.settings[s].first) + "," + fmt("%g", runs.settings[s].second) +
                  ") " + std::to_string(pairs) + " pairs, max |z| = " + fmt("%.2f", worst) +
                  (one_sided ? " ONE-SIDED" : "") + "; ";
  }
  return out;
}

Outcome tempering() {
  const RegionGraph g = oracle_grid();
  const double w = 0.5;
  const std::vector<double> gammas = {0.0, 0.5, 1.0};
  MeasureParams base = oracle_params(0.0, w);
  std::vector<std::vector<double>> exact;
  const std::vector<Plan> plans = enumerate_two_district_plans(g, base);
  for (double gamma : gammas) exact.push_back(exact_distribution(g, plans, oracle_params(gamma, w)));
  const PlanIndex index(plans);
  Outcome out;

  // Reservoir: pooled gamma = 0 chains.
  ReservoirSpec spec;
  spec.chains = 4;
  spec.steps = 250000;
  spec.subsample_every = 5;
  spec.burn_in_fraction = 0.01;
  const Reservoir res = reservoir_build(g, base, &plans[0], spec, 404, 4);
  std::vector<double> pooled(plans.size(), 0);
  for (const ReservoirRecord& r : res.records) pooled[index(r.plan)] += 1;
  const double tv_res = total_variation(normalise(pooled), exact[0]);
  out.pass = tv_res < kTvTol;
  out.detail = "reservoir TV=" + fmt("%.4f", tv_res) + "; ";

  auto run_variant = [&](bool live_base) {
    LadderConfig c;
    c.gammas = gammas;
    c.w = w;
    c.swap_interval = 10;
    c.live_base = live_base;
    std::vector<ChainState> init;
    Rng rng(505);
    for (std::size_t r = live_base ? 0 : 1; r < gammas.size(); ++r)
      init.push_back(make_initial_state(g, plans[r % plans.size()], oracle_params(gammas[r], w), rng));
    Ladder ladder(g, base, c, std::move(init), 606);
    std::vector<std::vector<double>> freq(gammas.size(), std::vector<double>(plans.size(), 0));
    ladder.run(kLadderSteps, 1, live_base ? nullptr : &res,
               [&](std::size_t rung, const ChainState& s) { freq[rung][index(s.plan)] += 1; }, true, 3);
    return freq;
  };
  const auto bath = run_variant(false);
  const auto live = run_variant(true);
  for (std::size_t r = 1; r < gammas.size(); ++r) {
    const double tv = total_variation(normalise(bath[r]), exact[r]);
    out.pass = out.pass && tv < kTvTol;
    out.detail += "heat-bath rung " + std::to_string(r) + " TV=" + fmt("%.4f", tv) + "; ";
  }
  for (std::size_t r = 0; r < gammas.size(); ++r) {
    const double tv = total_variation(normalise(live[r]), exact[r]);
    out.pass = out.pass && tv < kTvTol;
    out.detail += "live rung " + std::to_string(r) + " TV=" + fmt("%.4f", tv) + "; ";
  }
  for (std::size_t r = 1; r < gammas.size(); ++r) {
    const double tv = total_variation(normalise(bath[r]), normalise(live[r]));
    out.pass = out.pass && tv < kTvTol;
    out.detail += "bath vs live rung " + std::to_string(r) + " TV=" + fmt("%.4f", tv) + "; ";
  }

  Rng rng(707);
  bool antisym = true;
  for (int i = 0; i < 10000; ++i) {
    const double a = 500 * rng.uniform01(), b = 500 * rng.uniform01();
    const double gi = rng.uniform01(), gj = rng.uniform01(), ww = rng.uniform01();
    antisym = antisym && swap_log_ratio(a, b, gi, gj, ww) == -swap_log_ratio(b, a, gi, gj, ww) &&
              swap_log_ratio(a, b, gi, gj, ww) == -swap_log_ratio(a, b, gj, gi, ww);
  }
  out.pass = out.pass && antisym;
  out.detail += std::string("antisymmetry exact: ") + (antisym ? "yes" : "no");
  return out;
}

Outcome density_reduction() {
  const RegionGraph g = oracle_grid();
  Outcome out;
  Rng rng(808);
  // gamma = 0: forest density identically 0 over feasible plans, for any w.
  bool flat = true;
  for (int i = 0; i < 5; ++i) {
    const MeasureParams p = oracle_params(0.0, 10 * rng.uniform01());
    for (const Plan& plan : enumerate_two_district_plans(g, p))
      flat = flat && log_density(g, plan, StateSpace::Forest, p) == 0.0;
  }
  // Swap ratio from full plan-space densities (tau products included)
  // equals the closed form in (dgamma, w, dJ).
  const std::vector<Plan> plans = enumerate_two_district_plans(g, oracle_params(0.0, 0.0));
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const Plan& x = plans[rng.uniform_index(plans.size())];
    const Plan& y = plans[rng.uniform_index(plans.size())];
    const double gi = rng.uniform01(), gj = rng.uniform01(), w = rng.uniform01();
    const MeasureParams pi = oracle_params(gi, w), pj = oracle_params(gj, w);
    const double full = log_density(g, y, StateSpace::Plan, pi) + log_density(g, x, StateSpace::Plan, pj) -
                        log_density(g, x, StateSpace::Plan, pi) - log_density(g, y, StateSpace::Plan, pj);
    const double Jx = isoperimetric_score(g, x).J, Jy = isoperimetric_score(g, y).J;
    const double closed = swap_log_ratio(Jx, Jy, gi, gj, w);
    // Shifting both J by a constant or both gammas by a constant leaves it unchanged.
    const double shifted = swap_log_ratio(Jx + 37.5, Jy + 37.5, gi, gj, w);
    worst = std::max({worst, std::fabs(full - closed), std::fabs(closed - (gi - gj) * w * (Jx - Jy)),
                      std::fabs(shifted - closed)});
  }
  out.pass = flat && worst < kSymbolicTol;
  out.detail = std::string("gamma=0 forest density constant: ") + (flat ? "yes" : "no") +
               "; 1000 swap pairs, max |error| = " + fmt("%.2e", worst);
  return out;
}

EnsembleRecord shares_record(const std::vector<double>& shares, std::uint64_t id = 0) {
  EnsembleRecord r;
  r.plan_id = id;
  r.population.assign(shares.size(), 1.0);
  r.bvap.assign(shares.size(), 0.0);
  r.tvap.assign(shares.size(), 1.0);
  std::vector<VoteCount> row;
  for (double s : shares) row.push_back({100 * s, 100 * (1 - s)});
  r.votes.push_back(row);
  return r;
}

Outcome analysis_fidelity() {
  std::vector<std::string> failures;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  // Seats.
  expect(seats_won(std::vector<double>{0.4, 0.6, 0.55}).seats == 2, "seats");
  const SeatCount tie = seats_won(std::vector<double>{0.5});
  expect(tie.seats == 0 && tie.tie, "tie");
  // CSH on three hand-built plans (K = 3).
  const std::vector<EnsembleRecord> ens = {shares_record({0.6, 0.3, 0.55}, 0), shares_record({0.6, 0.6, 0.55}, 1),
                                           shares_record({0.1, 0.3, 0.5}, 2)};
  const auto h = collected_seat_histogram(ens, {"E"}, {0}, &ens[0]);
  expect(h[0].counts == std::vector<std::uint64_t>{1, 0, 1, 1} && h[0].ties == 1 && h[0].reference->seats == 2,
         "csh");
  // Swing.
  const auto sw = uniform_swing({0.45, 0.55}, 0.06);
  expect(std::fabs(sw[0] - 0.51) < 1e-12 && std::fabs(sw[1] - 0.61) < 1e-12 && seats_won(sw).seats == 2, "swing");
  expect(uniform_swing({0.98}, 0.05) == std::vector<double>{1.0}, "swing clip");
  // Rank marginals.
  const auto m = rank_ordered_marginals({shares_record({0.4, 0.6}), shares_record({0.8, 0.2})}, 0);
  expect(std::fabs(m[0][3] - 0.3) < 1e-12 && std::fabs(m[1][3] - 0.7) < 1e-12, "rank median");
  // Polarization on a hand fixture.
  const EnsembleRecord ref = shares_record({0.3, 0.4, 0.6, 0.7});
  const PolarizationStats pol =
      polarization_stats({shares_record({0.3, 0.4, 0.5, 0.8}), shares_record({0.35, 0.4, 0.5, 0.6}),
                          shares_record({0.2, 0.3, 0.6, 0.9})},
                         0, ref, {1, 2}, {4});
  expect(pol.low_count == 2 && pol.high_count == 2 && pol.total == 3, "polarization");

  // Responsiveness monotone in the election set, randomized.
  Rng rng(909);
  bool resp_ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EnsembleRecord> plans;
    for (int p = 0; p < 100; ++p) {
      EnsembleRecord r = shares_record({0.5, 0.5, 0.5, 0.5}, p);
      r.votes.clear();
      for (int e = 0; e < 6; ++e) {
        std::vector<VoteCount> row;
        for (int d = 0; d < 4; ++d) {
          const double s = 0.35 + 0.3 * rng.uniform01();
          row.push_back({s, 1 - s});
        }
        r.votes.push_back(row);
      }
      plans.push_back(r);
    }
    double prev = 1.0;
    for (std::size_t n = 2; n <= 6; ++n) {
      std::vector<std::size_t> es(n);
      std::iota(es.begin(), es.end(), 0);
      const double f = responsiveness_fraction(plans, es).fraction;
      resp_ok = resp_ok && f <= prev;
      prev = f;
    }
  }
  expect(resp_ok, "responsiveness monotonicity");

  // Swing monotonicity on 1000 random share vectors.
  bool swing_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> shares(14);
    for (double& s : shares) s = rng.uniform01();
    int prev = -1;
    for (double delta = -0.6; delta <= 0.6; delta += 0.005) {
      const int seats = seats_won(uniform_swing(shares, delta)).seats;
      swing_ok = swing_ok && seats >= prev;
      prev = seats;
    }
  }
  expect(swing_ok, "swing monotonicity");

  Outcome out;
  out.pass = failures.empty();
  out.detail = failures.empty() ? "all fixtures match" : "";
  for (const auto& f : failures) out.detail += "mismatch: " + f + "; ";
  return out;
}

Outcome vra_algebra() {
  Rng rng(1001);
  int disagreements = 0, tested = 0;
  while (tested < 10000) {
    const double B = 1000 * rng.uniform01(), D = 1000 * rng.uniform01(), R = 1000 * rng.uniform01();
    if (D == R) continue;
    ++tested;
    disagreements += vra_general_condition(B, D, R, 1.0) != (D > R);
  }

  // Planted c: three black-candidate and four other elections over five
  // units; every black-candidate total is built from each other election's
  // share via the model equation with the same c. That forces all other
  // elections to share one two-party share.
  const double c = 1.07;
  const int units = 5;
  std::vector<Unit> us(units);
  double bvap = 0, tvap = 0;
  for (int i = 0; i < units; ++i) {
    us[i].id = "u" + std::to_string(i);
    us[i].population = 1;
    us[i].area = 1;
    us[i].county = "C";
    us[i].bvap = 100 + 40 * rng.uniform01();
    us[i].tvap = 400 + 100 * rng.uniform01();
    bvap += us[i].bvap;
    tvap += us[i].tvap;
  }
  const double nb_share = 0.47;
  const std::vector<std::string> ids = {"B1", "B2", "B3", "N1", "N2", "N3", "N4"};
  for (std::size_t e = 0; e < ids.size(); ++e) {
    const bool black = ids[e][0] == 'B';
    const double turnout = 800 + 200 * rng.uniform01();  // statewide two-party total
    double D = nb_share * turnout;
    if (black) {
      const double B = bvap * turnout / tvap;
      D = B + c * (nb_share * turnout - B);
    }
    for (int i = 0; i < units; ++i) us[i].votes.push_back({D / units, (turnout - D) / units});
  }
  const RegionGraph g(us, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}}, ids);
  const VraEstimate est = vra_estimate_c(g, {}, {"B1", "B2", "B3"});
  const double err = std::fabs(est.c_mean - c);

  Outcome out;
  out.pass = disagreements == 0 && est.pairs_used == 12 && err < kPlantedCTol;
  out.detail = "c=1 reduction: " + std::to_string(disagreements) + " disagreements in 10000; planted c=1.07 over " +
               std::to_string(est.pairs_used) + " pairs, |error| = " + fmt("%.2e", err);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "trecom_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path toy = fs::path(TRECOM_SOURCE_DIR) / "data" / "toy";
  fs::copy_file(toy / "graph.json", dir / "graph.json");
  fs::copy_file(toy / "reference_plan.csv", dir / "reference_plan.csv");
  nlohmann::json cfg = nlohmann::json::parse(slurp(toy / "config.json"));
  cfg["steps"] = 4000;
  cfg["checkpoint_every"] = 1000;
  cfg["reservoir"]["steps"] = 5000;
  std::ostringstream sink;
  auto run = [&](const std::string& out, std::vector<std::string> extra) {
    cfg["out"] = out;
    std::ofstream(dir / "config.json") << cfg.dump();
    std::vector<std::string> args = {"--config", (dir / "config.json").string()};
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
  };
  auto cli = [&](const std::string& cmd, std::vector<std::string> args) {
    args.insert(args.begin(), cmd);
    return run_cli(args, sink, sink);
  };
  bool ok = true;
  for (const char* out : {"a", "b", "c"}) ok = ok && cli("reservoir", run(out, {})) == kExitOk;
  ok = ok && cli("temper", run("a", {"--workers", "1"})) == kExitOk;
  ok = ok && cli("temper", run("b", {"--workers", "4"})) == kExitOk;
  // Interrupted: stop at 1500 steps, leave a torn line, then resume.
  ok = ok && cli("temper", run("c", {"--steps", "1500"})) == kExitOk;
  std::ofstream(dir / "c" / "ensemble.jsonl", std::ios::app) << "{\"plan_id\": 7, \"torn";
  ok = ok && cli("temper", run("c", {"--resume"})) == kExitOk;
  const std::string a = slurp(dir / "a" / "ensemble.jsonl");
  const bool same = !a.empty() && a == slurp(dir / "b" / "ensemble.jsonl");
  const bool resumed = a == slurp(dir / "c" / "ensemble.jsonl");
  const bool reservoir_same = slurp(dir / "a" / "reservoir.jsonl") == slurp(dir / "b" / "reservoir.jsonl");
  fs::remove_all(dir);
  Outcome out;
  out.pass = ok && same && resumed && reservoir_same;
  out.detail = std::string("rerun identical: ") + (same && reservoir_same ? "yes" : "no") +
               "; resumed identical: " + (resumed ? "yes" : "no") + (ok ? "" : "; a command failed");
  return out;
}

Outcome default_config() {
  const RunConfig c = parse_config("{}");
  bool gammas = c.gammas.size() == 11;
  for (std::size_t i = 0; gammas && i < 11; ++i) gammas = std::fabs(c.gammas[i] - static_cast<double>(i) / 10) < 1e-15;
  Outcome out;
  out.pass = c.num_districts == 14 && c.pop_tolerance == 0.01 && c.max_county_splits == 21 && gammas &&
             c.w == 0.04 && c.subsample_every == 25;
  out.detail = "K=" + std::to_string(c.num_districts) + " tol=" + fmt("%g", c.pop_tolerance) +
               " splits=" + std::to_string(c.max_county_splits) + " levels=" + std::to_string(c.gammas.size()) +
               " w=" + fmt("%g", c.w) + " subsample=" + std::to_string(c.subsample_every);
  return out;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](const std::string& name, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " | " << o.detail << " | " << fmt("%.1fs", secs)
              << std::endl;
  };
  report("matrix-tree oracle", matrix_tree);
  report("UST uniformity", ust_uniformity);
  std::unique_ptr<OracleRuns> runs;
  report("sampler exactness", [&] {
    runs = std::make_unique<OracleRuns>();
    return sampler_exactness(*runs);
  });
  report("detailed balance", [&] { return runs ? detailed_balance(*runs) : Outcome{false, "no chain runs"}; });
  report("tempering correctness", tempering);
  report("density reduction", density_reduction);
  report("analysis formula fidelity", analysis_fidelity);
  report("VRA algebra", vra_algebra);
  report("determinism and resume", determinism);
  report("default configuration", default_config);
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
