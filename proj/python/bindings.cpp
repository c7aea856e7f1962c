// Python bindings for the sampler and analysis core.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <sstream>

#include "trecom/analysis.hpp"
#include "trecom/chain.hpp"
#include "trecom/cli.hpp"
#include "trecom/config.hpp"
#include "trecom/ensemble.hpp"
#include "trecom/error.hpp"
#include "trecom/measures.hpp"
#include "trecom/tempering.hpp"

namespace py = pybind11;
using namespace trecom;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tempered ReCom sampler core";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<RuntimeError>(m, "SamplerError", PyExc_RuntimeError);

  py::class_<RegionGraph>(m, "RegionGraph")
      .def_property_readonly("num_units", &RegionGraph::num_units)
      .def_property_readonly("num_edges", &RegionGraph::num_edges)
      .def_property_readonly("num_counties", &RegionGraph::num_counties)
      .def_property_readonly("elections", &RegionGraph::elections)
      .def_property_readonly("total_population", &RegionGraph::total_population)
      .def("unit_ids", [](const RegionGraph& g) {
        std::vector<std::string> ids;
        for (const Unit& u : g.units()) ids.push_back(u.id);
        return ids;
      })
      .def("index_of", &RegionGraph::index_of);

  m.def("load_graph", [](const std::filesystem::path& p) { return load_graph(p); }, py::arg("path"));
  m.def("parse_graph", [](const std::string& text) { return parse_graph(text); }, py::arg("text"));

  py::class_<Plan>(m, "Plan")
      .def(py::init([](std::vector<DistrictIndex> assignment, int k) { return Plan{std::move(assignment), k}; }),
           py::arg("assignment"), py::arg("num_districts"))
      .def_readonly("assignment", &Plan::assignment)
      .def_readonly("num_districts", &Plan::num_districts)
      .def("district_units", &Plan::district_units)
      .def("__eq__", [](const Plan& a, const Plan& b) { return a == b; });

  m.def("load_plan", &load_plan, py::arg("graph"), py::arg("path"));
  m.def("validate_plan", &validate_plan, py::arg("graph"), py::arg("plan"));

  py::class_<MeasureParams>(m, "MeasureParams")
      .def(py::init([](double gamma, double w, double tol, int splits, int k, bool interpolate) {
             MeasureParams p{gamma, w, tol, splits, k, interpolate};
             p.validate();
             return p;
           }),
           py::arg("gamma") = 0.0, py::arg("w") = 0.0, py::arg("pop_tolerance") = 0.01,
           py::arg("max_county_splits") = 21, py::arg("num_districts") = 14,
           py::arg("interpolate_tree_weight") = false)
      .def_readwrite("gamma", &MeasureParams::gamma)
      .def_readwrite("w", &MeasureParams::w)
      .def_readwrite("pop_tolerance", &MeasureParams::pop_tolerance)
      .def_readwrite("max_county_splits", &MeasureParams::max_county_splits)
      .def_readwrite("num_districts", &MeasureParams::num_districts);

  py::class_<ScoreBreakdown>(m, "ScoreBreakdown")
      .def_readonly("J", &ScoreBreakdown::J)
      .def_readonly("per_district_iso", &ScoreBreakdown::per_district_iso)
      .def_readonly("per_district_pp", &ScoreBreakdown::per_district_pp)
      .def_readonly("splits", &ScoreBreakdown::splits);

  m.def("isoperimetric_score", &isoperimetric_score, py::arg("graph"), py::arg("plan"));
  m.def("count_county_splits", &count_county_splits, py::arg("graph"), py::arg("plan"));
  m.def(
      "log_density",
      [](const RegionGraph& g, const Plan& plan, const MeasureParams& p, bool forest) {
        return log_density(g, plan, forest ? StateSpace::Forest : StateSpace::Plan, p);
      },
      py::arg("graph"), py::arg("plan"), py::arg("params"), py::arg("forest") = false);
  m.def(
      "log_hierarchical_tree_count",
      [](const RegionGraph& g, std::vector<UnitIndex> units) {
        std::sort(units.begin(), units.end());
        return log_hierarchical_tree_count(g, units);
      },
      py::arg("graph"), py::arg("units"));
  m.def(
      "log_tree_count",
      [](int n, const std::vector<std::pair<int, int>>& edges) {
        Multigraph mg;
        mg.num_vertices = n;
        mg.edges = edges;
        return log_tree_count(mg);
      },
      py::arg("num_vertices"), py::arg("edges"));

  // Runs a single chain and returns the visited plans' assignments at the
  // subsampled steps.
  m.def(
      "sample",
      [](const RegionGraph& g, const Plan& initial, const MeasureParams& p, std::uint64_t steps,
         std::uint64_t subsample_every, std::uint64_t seed) {
        Rng rng(seed);
        RecomChain chain(g, p, make_initial_state(g, initial, p, rng));
        std::vector<std::vector<DistrictIndex>> out;
        run_chain(chain, steps, subsample_every, rng,
                  [&](const ChainState& s) { out.push_back(s.plan.assignment); });
        return out;
      },
      py::arg("graph"), py::arg("initial"), py::arg("params"), py::arg("steps"), py::arg("subsample_every") = 1,
      py::arg("seed") = 0);

  m.def("swap_log_ratio", &swap_log_ratio, py::arg("J_i"), py::arg("J_j"), py::arg("gamma_i"), py::arg("gamma_j"),
        py::arg("w"));

  m.def(
      "seats_won",
      [](const std::vector<double>& shares) {
        const SeatCount s = seats_won(shares);
        return py::make_tuple(s.seats, s.tie);
      },
      py::arg("shares"));
  m.def("uniform_swing", &uniform_swing, py::arg("shares"), py::arg("delta"));
  m.def("quantile_type7", &quantile_type7, py::arg("values"), py::arg("q"));
  m.def("ks_statistic", &ks_statistic, py::arg("a"), py::arg("b"));
  m.def("vra_primary_condition", &vra_primary_condition, py::arg("B"), py::arg("D"));
  m.def("vra_general_condition", &vra_general_condition, py::arg("B"), py::arg("D"), py::arg("R"), py::arg("c"));

  m.def(
      "config_hash", [](const std::string& text) { return config_hash(parse_config(text)); }, py::arg("config_json"));

  // Same entry point as the command-line tool; returns (exit code, stdout, stderr).
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
