#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trecom/error.hpp"
#include "trecom/graph.hpp"

namespace trecom {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string id_string(const json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ParseError(where + ": id must be a string or integer");
}

double number(const json& obj, const char* key, const std::string& where, bool required = true) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw ParseError(where + ": missing field \"" + key + "\"");
    return 0.0;
  }
  if (!it->is_number()) throw ParseError(where + ": field \"" + key + "\" is not a number");
  return it->get<double>();
}

// Integral values are written as JSON integers so canonical output stays
// compact and stable.
ordered_json num(double v) {
  if (std::isfinite(v) && std::floor(v) == v && std::fabs(v) < 9.0e15)
    return static_cast<long long>(v);
  return v;
}

}  // namespace

RegionGraph parse_graph(const std::string& text, GraphCheck check) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("graph file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("units") || !doc["units"].is_array())
    throw ParseError("graph file: missing \"units\" array");
  if (!doc.contains("edges") || !doc["edges"].is_array())
    throw ParseError("graph file: missing \"edges\" array");

  const json& units_json = doc["units"];
  std::vector<std::string> elections;
  if (!units_json.empty()) {
    const json& first = units_json.front();
    if (first.contains("votes")) {
      if (!first["votes"].is_object()) throw ParseError("graph file: \"votes\" must be an object");
      for (auto it = first["votes"].begin(); it != first["votes"].end(); ++it)
        elections.push_back(it.key());
    }
  }

  std::vector<Unit> units;
  units.reserve(units_json.size());
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < units_json.size(); ++i) {
    const json& uj = units_json[i];
    const std::string where = "unit #" + std::to_string(i);
    if (!uj.is_object() || !uj.contains("id")) throw ParseError(where + ": missing id");
    Unit u;
    u.id = id_string(uj["id"], where);
    const std::string uw = "unit \"" + u.id + "\"";
    u.population = number(uj, "pop", uw);
    u.area = number(uj, "area", uw);
    u.exterior_perimeter = number(uj, "ext_perim", uw, false);
    if (!uj.contains("county")) throw ParseError(uw + ": missing field \"county\"");
    u.county = id_string(uj["county"], uw);
    u.bvap = number(uj, "bvap", uw, false);
    u.tvap = number(uj, "tvap", uw, false);
    if (uj.contains("mp_component") && !uj["mp_component"].is_null())
      u.mp_component = id_string(uj["mp_component"], uw);
    u.votes.resize(elections.size());
    const json votes = uj.value("votes", json::object());
    if (!votes.is_object()) throw ParseError(uw + ": \"votes\" must be an object");
    if (votes.size() != elections.size())
      throw ValidationError(uw + ": election columns differ from the first unit");
    for (std::size_t e = 0; e < elections.size(); ++e) {
      auto it = votes.find(elections[e]);
      if (it == votes.end())
        throw ValidationError(uw + ": missing election \"" + elections[e] + "\"");
      u.votes[e].dem = number(*it, "d", uw + " election " + elections[e]);
      u.votes[e].rep = number(*it, "r", uw + " election " + elections[e]);
    }
    if (u.population < 0.0) throw ValidationError(uw + " has negative population");
    index.emplace(u.id, static_cast<int>(i));
    units.push_back(std::move(u));
  }

  std::vector<Edge> edges;
  edges.reserve(doc["edges"].size());
  for (std::size_t i = 0; i < doc["edges"].size(); ++i) {
    const json& ej = doc["edges"][i];
    const std::string where = "edge #" + std::to_string(i);
    if (!ej.is_array() || ej.size() < 2 || ej.size() > 3)
      throw ParseError(where + ": expected [u, v, shared_len]");
    const std::string a = id_string(ej[0], where);
    const std::string b = id_string(ej[1], where);
    auto ia = index.find(a);
    if (ia == index.end()) throw ValidationError(where + " references unknown unit \"" + a + "\"");
    auto ib = index.find(b);
    if (ib == index.end()) throw ValidationError(where + " references unknown unit \"" + b + "\"");
    double len = 0.0;
    if (ej.size() == 3) {
      if (!ej[2].is_number()) throw ParseError(where + ": shared length is not a number");
      len = ej[2].get<double>();
    }
    edges.push_back({ia->second, ib->second, len});
  }
  return RegionGraph(std::move(units), std::move(edges), std::move(elections), check);
}

RegionGraph load_graph(const std::filesystem::path& path, GraphCheck check) {
  return parse_graph(read_file(path), check);
}

std::string serialize_graph(const RegionGraph& g) {
  ordered_json doc;
  doc["units"] = ordered_json::array();
  for (const Unit& u : g.units()) {
    ordered_json uj;
    uj["id"] = u.id;
    uj["pop"] = num(u.population);
    uj["area"] = num(u.area);
    uj["ext_perim"] = num(u.exterior_perimeter);
    uj["county"] = u.county;
    uj["bvap"] = num(u.bvap);
    uj["tvap"] = num(u.tvap);
    ordered_json votes = ordered_json::object();
    for (std::size_t e = 0; e < g.num_elections(); ++e)
      votes[g.elections()[e]] = {{"d", num(u.votes[e].dem)}, {"r", num(u.votes[e].rep)}};
    uj["votes"] = std::move(votes);
    if (u.mp_component) uj["mp_component"] = *u.mp_component;
    doc["units"].push_back(std::move(uj));
  }
  doc["edges"] = ordered_json::array();
  std::vector<EdgeIndex> order(g.num_edges());
  for (std::size_t e = 0; e < order.size(); ++e) order[e] = static_cast<EdgeIndex>(e);
  std::sort(order.begin(), order.end(), [&](EdgeIndex a, EdgeIndex b) {
    const Edge& x = g.edge(a);
    const Edge& y = g.edge(b);
    return x.u != y.u ? x.u < y.u : x.v < y.v;
  });
  for (EdgeIndex e : order) {
    const Edge& ed = g.edge(e);
    doc["edges"].push_back({g.unit(ed.u).id, g.unit(ed.v).id, num(ed.shared_length)});
  }
  return doc.dump(1) + "\n";
}

void save_graph(const RegionGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write " + path.string());
  out << serialize_graph(g);
  if (!out) throw RuntimeError("write failed: " + path.string());
}

Plan parse_plan(const RegionGraph& g, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::optional<long long>> labels(g.num_units());
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError("plan line " + std::to_string(lineno) + ": expected unit_id,district");
    std::string id = line.substr(0, comma);
    std::string dist = line.substr(comma + 1);
    if (lineno == 1 && id == "unit_id") continue;
    long long label = 0;
    try {
      std::size_t pos = 0;
      label = std::stoll(dist, &pos);
      if (pos != dist.size()) throw std::invalid_argument(dist);
    } catch (const std::exception&) {
      throw ParseError("plan line " + std::to_string(lineno) + ": bad district \"" + dist + "\"");
    }
    auto u = g.find(id);
    if (!u) throw ValidationError("plan references unknown unit \"" + id + "\"");
    if (labels[*u]) throw ValidationError("plan assigns unit \"" + id + "\" twice");
    labels[*u] = label;
  }
  std::map<long long, int> dense;
  for (std::size_t u = 0; u < labels.size(); ++u) {
    if (!labels[u]) throw ValidationError("plan leaves unit \"" + g.unit(static_cast<UnitIndex>(u)).id + "\" unassigned");
    dense.emplace(*labels[u], 0);
  }
  int k = 0;
  for (auto& [label, d] : dense) d = k++;
  Plan plan;
  plan.num_districts = k;
  plan.assignment.reserve(labels.size());
  for (const auto& l : labels) plan.assignment.push_back(dense.at(*l));
  return plan;
}

Plan load_plan(const RegionGraph& g, const std::filesystem::path& path) {
  return parse_plan(g, read_file(path));
}

void save_plan(const RegionGraph& g, const Plan& plan, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write " + path.string());
  out << "unit_id,district\n";
  for (std::size_t u = 0; u < plan.assignment.size(); ++u)
    out << g.unit(static_cast<UnitIndex>(u)).id << ',' << plan.assignment[u] << '\n';
}

}  // namespace trecom
