#include "trecom/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "detail/format.hpp"
#include "trecom/error.hpp"

namespace trecom {

using nlohmann::json;
using nlohmann::ordered_json;

EnsembleRecord make_record(const RegionGraph& g, const Plan& plan, const ScoreBreakdown& score,
                           std::uint64_t plan_id, std::uint64_t step, int rung) {
  const int k = plan.num_districts;
  EnsembleRecord r;
  r.plan_id = plan_id;
  r.step = step;
  r.rung = rung;
  r.assignment = plan.assignment;
  r.J = score.J;
  r.splits = score.splits;
  r.population.assign(k, 0.0);
  r.bvap.assign(k, 0.0);
  r.tvap.assign(k, 0.0);
  r.votes.assign(g.num_elections(), std::vector<VoteCount>(k));
  for (UnitIndex u = 0; u < static_cast<UnitIndex>(g.num_units()); ++u) {
    const Unit& unit = g.unit(u);
    const int d = plan.assignment[u];
    r.population[d] += unit.population;
    r.bvap[d] += unit.bvap;
    r.tvap[d] += unit.tvap;
    for (std::size_t e = 0; e < g.num_elections(); ++e) r.votes[e][d] += unit.votes[e];
  }
  r.polsby_popper = score.per_district_pp;
  return r;
}

EnsembleRecord make_record(const RegionGraph& g, const Plan& plan, std::uint64_t plan_id) {
  ScoreBreakdown s = isoperimetric_score(g, plan);
  s.splits = count_county_splits(g, plan);
  return make_record(g, plan, s, plan_id, 0);
}

std::vector<std::pair<DistrictIndex, std::uint32_t>> rle_encode(const std::vector<DistrictIndex>& assignment) {
  std::vector<std::pair<DistrictIndex, std::uint32_t>> runs;
  for (DistrictIndex d : assignment) {
    if (!runs.empty() && runs.back().first == d)
      ++runs.back().second;
    else
      runs.emplace_back(d, 1);
  }
  return runs;
}

std::vector<DistrictIndex> rle_decode(const std::vector<std::pair<DistrictIndex, std::uint32_t>>& runs) {
  std::vector<DistrictIndex> out;
  for (const auto& [d, n] : runs) out.insert(out.end(), n, d);
  return out;
}

std::string serialize_record(const EnsembleRecord& r) {
  ordered_json j;
  j["plan_id"] = r.plan_id;
  j["step"] = r.step;
  if (r.rung >= 0) j["rung"] = r.rung;
  j["J"] = r.J;
  j["splits"] = r.splits;
  j["assignment_rle"] = rle_encode(r.assignment);
  j["pop"] = r.population;
  j["bvap"] = r.bvap;
  j["tvap"] = r.tvap;
  ordered_json votes = ordered_json::array();
  for (const auto& per_district : r.votes) {
    ordered_json d = ordered_json::array(), rep = ordered_json::array();
    for (const VoteCount& v : per_district) {
      d.push_back(v.dem);
      rep.push_back(v.rep);
    }
    votes.push_back({{"d", d}, {"r", rep}});
  }
  j["votes"] = std::move(votes);
  j["pp"] = r.polsby_popper;
  return j.dump();
}

EnsembleRecord parse_record(const std::string& line, std::size_t num_elections) {
  try {
    const json j = json::parse(line);
    EnsembleRecord r;
    r.plan_id = j.at("plan_id").get<std::uint64_t>();
    r.step = j.at("step").get<std::uint64_t>();
    r.rung = j.value("rung", -1);
    r.J = j.at("J").get<double>();
    r.splits = j.at("splits").get<int>();
    r.assignment = rle_decode(j.at("assignment_rle").get<std::vector<std::pair<DistrictIndex, std::uint32_t>>>());
    r.population = j.at("pop").get<std::vector<double>>();
    r.bvap = j.at("bvap").get<std::vector<double>>();
    r.tvap = j.at("tvap").get<std::vector<double>>();
    const auto& votes = j.at("votes");
    if (votes.size() != num_elections) throw ParseError("record has votes for the wrong number of elections");
    for (const auto& e : votes) {
      const auto d = e.at("d").get<std::vector<double>>();
      const auto rep = e.at("r").get<std::vector<double>>();
      if (d.size() != r.population.size() || rep.size() != r.population.size())
        throw ParseError("record vote arrays have the wrong length");
      std::vector<VoteCount> per;
      for (std::size_t i = 0; i < d.size(); ++i) per.push_back({d[i], rep[i]});
      r.votes.push_back(std::move(per));
    }
    r.polsby_popper = j.at("pp").get<std::vector<double>>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed ensemble record: ") + e.what());
  }
}

namespace {

std::string serialize_header(const EnsembleHeader& h) {
  ordered_json j;
  j["type"] = "trecom-ensemble";
  j["elections"] = h.elections;
  j["num_districts"] = h.num_districts;
  j["config_hash"] = h.config_hash;
  j["unit_ids"] = h.unit_ids;
  return j.dump();
}

EnsembleHeader parse_header(const std::string& line) {
  try {
    const json j = json::parse(line);
    if (j.value("type", "") != "trecom-ensemble") throw ParseError("not an ensemble file (bad header)");
    EnsembleHeader h;
    h.elections = j.at("elections").get<std::vector<std::string>>();
    h.num_districts = j.at("num_districts").get<int>();
    h.config_hash = j.at("config_hash").get<std::string>();
    h.unit_ids = j.at("unit_ids").get<std::vector<std::string>>();
    return h;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed ensemble header: ") + e.what());
  }
}

}  // namespace

EnsembleWriter::EnsembleWriter(const std::filesystem::path& path, const EnsembleHeader& header, bool append)
    : path_(path) {
  if (append && std::filesystem::exists(path)) {
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    const EnsembleHeader existing = parse_header(first);
    if (existing.config_hash != header.config_hash)
      throw ValidationError("existing ensemble " + path.string() + " was written with a different config");
    out_.open(path, std::ios::app);
  } else {
    out_.open(path, std::ios::trunc);
    if (out_) out_ << serialize_header(header) << '\n';
  }
  if (!out_) throw RuntimeError("cannot write " + path.string());
}

void EnsembleWriter::write(const EnsembleRecord& r) {
  out_ << serialize_record(r) << '\n';
  if (!out_) throw RuntimeError("failed writing " + path_.string());
}

void EnsembleWriter::flush() {
  out_.flush();
  if (!out_) throw RuntimeError("failed writing " + path_.string());
}

Ensemble read_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot read " + path.string());
  Ensemble e;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty ensemble file");
  e.header = parse_header(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      e.records.push_back(parse_record(line, e.header.elections.size()));
    } catch (const ParseError& err) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + err.what());
    }
  }
  return e;
}

void truncate_ensemble(const std::filesystem::path& path, std::size_t records) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot read " + path.string());
  std::string kept, line;
  std::size_t lines = 0;
  while (lines < records + 1 && std::getline(in, line)) {
    kept += line + '\n';
    ++lines;
  }
  if (lines < records + 1)
    throw RuntimeError(path.string() + " holds fewer records than the checkpoint expects");
  in.close();
  std::ofstream out(path, std::ios::trunc);
  out << kept;
  if (!out) throw RuntimeError("failed writing " + path.string());
}

std::string score_csv_header(int num_districts) {
  std::string s = "plan_id,J,splits";
  for (int i = 1; i <= num_districts; ++i) s += ",pp_rank" + std::to_string(i);
  return s;
}

std::string score_csv_row(const EnsembleRecord& r) {
  std::vector<double> pp = r.polsby_popper;
  std::sort(pp.begin(), pp.end());
  std::string s = std::to_string(r.plan_id) + "," + detail::fmt(r.J) + "," + std::to_string(r.splits);
  for (double v : pp) s += "," + detail::fmt(v);
  return s;
}

}  // namespace trecom
