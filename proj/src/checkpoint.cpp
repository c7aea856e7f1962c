#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trecom/chain.hpp"
#include "trecom/error.hpp"

namespace trecom {

using nlohmann::json;
using nlohmann::ordered_json;

std::string serialize_checkpoint(const RegionGraph& g, const ChainState& state, const Rng& rng) {
  ordered_json j;
  j["step"] = state.step;
  j["rng"] = rng.serialize();
  j["num_districts"] = state.plan.num_districts;
  j["assignment"] = state.plan.assignment;
  ordered_json trees = ordered_json::array();
  for (const Tree& t : state.forest.trees) {
    ordered_json edges = ordered_json::array();
    for (EdgeIndex e : t) edges.push_back({g.unit(g.edge(e).u).id, g.unit(g.edge(e).v).id});
    trees.push_back(std::move(edges));
  }
  j["forest"] = std::move(trees);
  return j.dump() + "\n";
}

Checkpoint parse_checkpoint(const RegionGraph& g, const MeasureParams& p, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    ChainState state;
    state.step = j.at("step").get<std::uint64_t>();
    state.plan.num_districts = j.at("num_districts").get<int>();
    state.plan.assignment = j.at("assignment").get<std::vector<DistrictIndex>>();
    for (const auto& tree : j.at("forest")) {
      Tree t;
      for (const auto& pair : tree) {
        const UnitIndex u = g.index_of(pair.at(0).get<std::string>());
        const UnitIndex v = g.index_of(pair.at(1).get<std::string>());
        const auto e = g.edge_between(u, v);
        if (!e) throw ParseError("checkpoint tree uses a non-edge");
        t.push_back(*e);
      }
      std::sort(t.begin(), t.end());
      state.forest.trees.push_back(std::move(t));
    }
    Rng rng = Rng::deserialize(j.at("rng").get<std::string>());
    // Constructing a chain validates the state and fills the cached scores.
    RecomChain chain(g, p, state);
    return Checkpoint{chain.state(), rng};
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const RegionGraph& g, const ChainState& state, const Rng& rng,
                     const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw RuntimeError("cannot write " + tmp.string());
    out << serialize_checkpoint(g, state, rng);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const RegionGraph& g, const MeasureParams& p, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(g, p, ss.str());
}

}  // namespace trecom
