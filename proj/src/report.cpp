#include "trecom/report.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "detail/format.hpp"
#include "trecom/error.hpp"

namespace trecom {

using detail::fmt;
using nlohmann::ordered_json;

namespace {

class Bundle {
 public:
  explicit Bundle(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  std::ofstream open(const std::string& name, const std::string& kind, const std::string& election = "") {
    std::ofstream out(dir_ / name);
    if (!out) throw RuntimeError("cannot write " + (dir_ / name).string());
    entries_.push_back({name, kind, election});
    return out;
  }
  void write_json(const std::string& name, const std::string& kind, const ordered_json& j,
                  const std::string& election = "") {
    auto out = open(name, kind, election);
    out << j.dump(1) << '\n';
  }
  const std::vector<ManifestEntry>& entries() const { return entries_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<ManifestEntry> entries_;
};

std::string quantile_header(const std::vector<double>& qs) {
  std::string s;
  for (double q : qs) s += ",q" + fmt(q * 100.0);
  return s;
}

std::size_t election_position(const std::vector<std::string>& ids, const std::string& id) {
  auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw ValidationError("unknown election \"" + id + "\"");
  return static_cast<std::size_t>(it - ids.begin());
}

}  // namespace

std::vector<ManifestEntry> write_analysis(const RegionGraph& g, const RunConfig& cfg, const Ensemble& ensemble,
                                          const std::vector<Ensemble>& streams, const Plan* reference_plan,
                                          const std::filesystem::path& out_dir) {
  const std::vector<EnsembleRecord>& recs = ensemble.records;
  if (recs.empty()) throw ValidationError("ensemble has no records");
  const std::vector<std::string>& ids = ensemble.header.elections;
  if (ids != g.elections()) throw ValidationError("ensemble elections differ from the graph's");
  const AnalysisConfig& ac = cfg.analysis;

  std::vector<std::size_t> elections;
  for (const std::string& id : cfg.elections.empty() ? ids : cfg.elections)
    elections.push_back(election_position(ids, id));
  std::vector<std::size_t> swing_elections;
  for (const std::string& id : ac.swing_elections) swing_elections.push_back(election_position(ids, id));
  if (ac.swing_elections.empty()) swing_elections = elections;

  std::optional<EnsembleRecord> ref;
  if (reference_plan) ref = make_record(g, *reference_plan);
  const EnsembleRecord* refp = ref ? &*ref : nullptr;
  const int k = recs.front().num_districts();

  Bundle b(out_dir);

  {
    auto out = b.open("scores.csv", "scores");
    out << score_csv_header(k) << '\n';
    for (const EnsembleRecord& r : recs) out << score_csv_row(r) << '\n';
  }

  {
    auto out = b.open("csh.csv", "collected_seat_histogram");
    out << "election,statewide_share,seats,count,fraction,ties,reference_seats,reference_tie\n";
    for (const SeatHistogram& h : collected_seat_histogram(recs, ids, elections, refp))
      for (std::size_t s = 0; s < h.counts.size(); ++s)
        out << h.election << ',' << fmt(h.statewide_share) << ',' << s << ',' << h.counts[s] << ','
            << fmt(static_cast<double>(h.counts[s]) / static_cast<double>(recs.size())) << ',' << h.ties << ','
            << (h.reference ? std::to_string(h.reference->seats) : "") << ','
            << (h.reference ? (h.reference->tie ? "1" : "0") : "") << '\n';
  }

  if (elections.size() >= 2) {
    ordered_json j;
    const Responsiveness all = responsiveness_fraction(recs, elections);
    j["elections"] = elections.size();
    j["constant_plans"] = all.constant;
    j["total_plans"] = all.total;
    j["fraction"] = all.fraction;
    if (refp) {
      std::vector<EnsembleRecord> one{*refp};
      j["reference_constant"] = responsiveness_fraction(one, elections).constant == 1;
    }
    ordered_json leave_one_out = ordered_json::array();
    if (elections.size() >= 3)
      for (std::size_t drop = 0; drop < elections.size(); ++drop) {
        std::vector<std::size_t> subset;
        for (std::size_t i = 0; i < elections.size(); ++i)
          if (i != drop) subset.push_back(elections[i]);
        const Responsiveness r = responsiveness_fraction(recs, subset);
        leave_one_out.push_back({{"excluded", ids[elections[drop]]}, {"constant_plans", r.constant}, {"fraction", r.fraction}});
      }
    j["leave_one_out"] = std::move(leave_one_out);
    b.write_json("responsiveness.json", "responsiveness", j);
  }

  if (refp) {
    ordered_json windows = ordered_json::array();
    for (std::size_t e : swing_elections) {
      const double statewide = statewide_share(*refp, e);
      const auto rows =
          swing_sweep(recs, e, *refp, swing_grid_for_targets(statewide, ac.swing_lo, ac.swing_hi, ac.swing_step));
      auto out = b.open("swing_" + ids[e] + ".csv", "swing_histogram", ids[e]);
      out << "delta,statewide_share,seats,count,fraction,reference_seats\n";
      for (const SwingRow& row : rows)
        for (std::size_t s = 0; s < row.counts.size(); ++s)
          out << fmt(row.delta) << ',' << fmt(row.statewide_share) << ',' << s << ',' << row.counts[s] << ','
              << fmt(static_cast<double>(row.counts[s]) / static_cast<double>(recs.size())) << ','
              << row.reference->seats << '\n';
      if (ac.swing_window) {
        const WindowFraction w = swing_window_fraction(rows, ac.swing_window->first, ac.swing_window->second);
        windows.push_back({{"election", ids[e]},
                           {"lo", ac.swing_window->first},
                           {"hi", ac.swing_window->second},
                           {"at_most_reference", w.at_most_reference},
                           {"total", w.total},
                           {"fraction", w.fraction}});
      }
    }
    if (ac.swing_window) b.write_json("swing_window.json", "swing_window", windows);
  }

  for (std::size_t e : elections) {
    const auto q = rank_ordered_marginals(recs, e);
    auto out = b.open("rank_marginals_" + ids[e] + ".csv", "rank_marginals", ids[e]);
    out << "rank" << quantile_header(kDefaultQuantiles) << ",reference\n";
    const std::vector<double> ref_ranked = refp ? ranked_shares(*refp, e) : std::vector<double>{};
    for (int r = 0; r < k; ++r) {
      out << r + 1;
      for (double v : q[r]) out << ',' << fmt(v);
      out << ',' << (refp ? fmt(ref_ranked[r]) : "") << '\n';
    }
  }

  {
    std::vector<std::vector<double>> pp;
    for (const EnsembleRecord& r : recs) pp.push_back(r.polsby_popper);
    const auto q = rank_quantiles(pp);
    std::vector<double> ref_pp = refp ? refp->polsby_popper : std::vector<double>{};
    std::sort(ref_pp.begin(), ref_pp.end());
    auto out = b.open("compactness.csv", "compactness_ranked_pp");
    out << "rank" << quantile_header(kDefaultQuantiles) << ",reference\n";
    for (int r = 0; r < k; ++r) {
      out << r + 1;
      for (double v : q[r]) out << ',' << fmt(v);
      out << ',' << (refp ? fmt(ref_pp[r]) : "") << '\n';
    }
  }

  const bool ranks_fit = std::all_of(ac.low_ranks.begin(), ac.low_ranks.end(), [&](int r) { return r <= k; }) &&
                         std::all_of(ac.high_ranks.begin(), ac.high_ranks.end(), [&](int r) { return r <= k; });
  if (refp && ranks_fit) {
    auto out = b.open("polarization.csv", "polarization");
    out << "election,low_count,low_fraction,high_count,high_fraction,total\n";
    for (std::size_t e : elections) {
      const PolarizationStats s = polarization_stats(recs, e, *refp, ac.low_ranks, ac.high_ranks);
      out << ids[e] << ',' << s.low_count << ',' << fmt(s.low_fraction) << ',' << s.high_count << ','
          << fmt(s.high_fraction) << ',' << s.total << '\n';
    }
  }

  const RankSelector top{RankSelector::Kind::TopDemocratic, std::min(ac.top_democratic, k)};
  const RankSelector most_r{RankSelector::Kind::MostRepublican, std::min(ac.most_republican, k)};
  for (const auto& [name, sel] : {std::pair{std::string("top_democratic"), top}, std::pair{std::string("most_republican"), most_r}}) {
    const auto freq = district_frequency_map(recs, elections, sel);
    auto out = b.open("frequency_" + name + ".csv", "frequency_map");
    out << "unit_id,frequency\n";
    for (std::size_t u = 0; u < freq.size(); ++u) out << g.unit(static_cast<UnitIndex>(u)).id << ',' << fmt(freq[u]) << '\n';
  }

  if (refp) {
    auto out = b.open("tail_share.csv", "tail_share");
    out << "election,selector,rank,reference_share,fraction_le,fraction_lt\n";
    for (std::size_t e : elections)
      for (const auto& [name, sel] : {std::pair{std::string("top_democratic"), top}, std::pair{std::string("most_republican"), most_r}})
        for (const TailShare& t : tail_share_comparison(recs, e, *refp, sel))
          out << ids[e] << ',' << name << ',' << t.rank << ',' << fmt(t.reference_share) << ',' << fmt(t.fraction_le)
              << ',' << fmt(t.fraction_lt) << '\n';
  }

  {
    std::vector<std::vector<EnsembleRecord>> parts;
    if (streams.empty()) {
      if (recs.size() >= 2) {
        const auto mid = recs.begin() + static_cast<std::ptrdiff_t>(recs.size() / 2);
        parts.emplace_back(recs.begin(), mid);
        parts.emplace_back(mid, recs.end());
      }
    } else {
      parts.push_back(recs);
      for (const Ensemble& s : streams) parts.push_back(s.records);
    }
    if (parts.size() >= 2) {
      auto out = b.open("convergence.csv", "convergence");
      out << "election,rank,ks,threshold,passes\n";
      for (std::size_t e : elections) {
        const ConvergenceReport rep = convergence_compare(parts, e, ac.convergence_threshold);
        for (int r = 0; r < k; ++r)
          out << ids[e] << ',' << r + 1 << ',' << fmt(rep.per_rank[r]) << ',' << fmt(rep.threshold) << ','
              << (rep.passes ? 1 : 0) << '\n';
      }
    }
  }

  {
    const VraModel& model = ac.vra;
    bool have_elections = true;
    for (const std::string& id : model.black_candidate)
      have_elections = have_elections && std::find(ids.begin(), ids.end(), id) != ids.end();
    if (have_elections && ids.size() > model.black_candidate.size()) {
      ordered_json j;
      std::vector<UnitIndex> scope;
      if (!ac.vra_scope_districts.empty()) {
        if (!reference_plan) throw ValidationError("VRA scope districts need a reference plan");
        for (const std::string& label : ac.vra_scope_districts) {
          const int d = std::stoi(label);
          if (d < 0 || d >= reference_plan->num_districts) throw ValidationError("unknown VRA scope district " + label);
          for (UnitIndex u = 0; u < static_cast<UnitIndex>(g.num_units()); ++u)
            if (reference_plan->assignment[u] == d) scope.push_back(u);
        }
      }
      const VraEstimate est = vra_estimate_c(g, scope, model.black_candidate);
      j["c_mean"] = est.c_mean;
      j["c_std"] = est.c_std;
      j["pairs_used"] = est.pairs_used;
      j["skipped_pairs"] = est.skipped;
      j["scope_units"] = scope.empty() ? g.num_units() : scope.size();
      VraModel base_model = model;
      base_model.bvap_floor.reset();
      const VraScreenResult screen = vra_screen(recs, ids, base_model);
      j["screen_c"] = model.c;
      j["required_districts"] = model.required_districts;
      j["min_passing_elections"] = model.min_passing_elections;
      j["passing"] = screen.passing.size();
      j["total"] = screen.total;
      j["fraction"] = screen.total ? static_cast<double>(screen.passing.size()) / static_cast<double>(screen.total) : 0.0;
      if (model.bvap_floor) {
        j["bvap_floor"] = *model.bvap_floor;
        j["passing_with_floor"] = vra_screen(recs, ids, model).passing.size();
      }
      if (refp) j["reference_passes"] = vra_plan_passes(*refp, ids, model);
      b.write_json("vra.json", "vra", j);
    }
  }

  ordered_json manifest;
  manifest["config_hash"] = ensemble.header.config_hash;
  manifest["num_plans"] = recs.size();
  manifest["num_districts"] = k;
  ordered_json items = ordered_json::array();
  for (const ManifestEntry& e : b.entries()) {
    ordered_json item{{"path", e.path}, {"kind", e.kind}};
    if (!e.election.empty()) item["election"] = e.election;
    items.push_back(std::move(item));
  }
  manifest["artifacts"] = std::move(items);
  std::ofstream out(out_dir / "manifest.json");
  if (!out) throw RuntimeError("cannot write " + (out_dir / "manifest.json").string());
  out << manifest.dump(1) << '\n';
  return b.entries();
}

}  // namespace trecom
