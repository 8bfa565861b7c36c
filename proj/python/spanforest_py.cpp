#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "spanforest/analysis.hpp"
#include "spanforest/experiments.hpp"
#include "spanforest/figures.hpp"

namespace py = pybind11;
using namespace spanforest;

namespace {

TreeSnapshot make_tree(const std::vector<std::uint32_t>& vertices,
                       const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
  std::vector<VertexId> vs;
  for (const auto v : vertices) vs.push_back(VertexId{v});
  std::vector<VertexPair> es;
  for (const auto& [a, b] : edges) es.emplace_back(VertexId{a}, VertexId{b});
  return TreeSnapshot::from_edges(std::move(vs), std::move(es));
}

BridgeSet make_bridges(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs) {
  BridgeSet out;
  for (const auto& [u, v] : pairs) out.push_back({VertexId{u}, VertexId{v}});
  return out;
}

py::dict estimate_dict(const Estimate& e) {
  py::dict d;
  d["mean"] = e.mean;
  d["ci_low"] = e.ci_low;
  d["ci_high"] = e.ci_high;
  d["samples"] = e.samples;
  return d;
}

}  // namespace

PYBIND11_MODULE(spanforest, m) {
  m.doc() = "Token random-walk spanning forest simulator";

  py::enum_<WalkPolicy>(m, "WalkPolicy")
      .value("UNIFORM", WalkPolicy::Uniform)
      .value("NON_BACKTRACKING", WalkPolicy::NonBacktracking);

  py::class_<TreeSnapshot>(m, "Tree")
      .def(py::init(&make_tree), py::arg("vertices"), py::arg("edges"))
      .def_property_readonly("size", &TreeSnapshot::size)
      .def_property_readonly("vertices",
                             [](const TreeSnapshot& t) {
                               std::vector<std::uint32_t> out;
                               for (const auto v : t.vertices()) out.push_back(v.value);
                               return out;
                             })
      .def_property_readonly("edges",
                             [](const TreeSnapshot& t) {
                               std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
                               for (const auto& [a, b] : t.edges()) out.emplace_back(a.value, b.value);
                               return out;
                             })
      .def("degree", [](const TreeSnapshot& t, std::uint32_t v) { return t.degree(VertexId{v}); });

  m.def(
      "random_tree",
      [](std::size_t n, std::uint64_t seed) {
        Rng rng(seed);
        return random_tree(n, rng);
      },
      py::arg("n"), py::arg("seed"));

  m.def(
      "stationary_prob", [](const TreeSnapshot& t, std::uint32_t v) { return to_double(stationary_prob(t, VertexId{v})); },
      py::arg("tree"), py::arg("vertex"));
  m.def(
      "fusion_probability",
      [](const TreeSnapshot& t1, const TreeSnapshot& t2, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& b) {
        return fusion_probability(t1, t2, make_bridges(b));
      },
      py::arg("t1"), py::arg("t2"), py::arg("bridges"));
  m.def(
      "expected_fusion_time",
      [](const TreeSnapshot& t1, const TreeSnapshot& t2, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& b) {
        return expected_fusion_time(t1, t2, make_bridges(b));
      },
      py::arg("t1"), py::arg("t2"), py::arg("bridges"));
  m.def(
      "exact_first_meeting",
      [](const TreeSnapshot& t1, const TreeSnapshot& t2, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& b,
         std::uint32_t s1, std::uint32_t s2, WalkPolicy policy) {
        return exact_first_meeting(t1, t2, make_bridges(b), VertexId{s1}, VertexId{s2},
                                   ActivationDiscipline::Interleaved, policy);
      },
      py::arg("t1"), py::arg("t2"), py::arg("bridges"), py::arg("start1"), py::arg("start2"),
      py::arg("policy") = WalkPolicy::Uniform);

  m.def(
      "measure_meeting",
      [](std::size_t n1, std::size_t n2, std::size_t k, std::uint64_t seed, WalkPolicy policy, std::size_t runs,
         std::size_t intervals) {
        MeetingOptions options;
        options.runs = runs;
        options.min_intervals = intervals;
        MeetingSummary summary;
        {
          py::gil_scoped_release release;
          summary = measure_meeting(Scenario{n1, n2, k, seed, {}}, policy, options);
        }
        py::dict d;
        d["first_meeting"] = estimate_dict(summary.first_meeting);
        d["inter_meeting"] = estimate_dict(*summary.inter_meeting);
        d["eq3_pooled"] = summary.pooled_fusion_time;
        d["invariant_failures"] = summary.invariant_failures;
        return d;
      },
      py::arg("n1"), py::arg("n2"), py::arg("k"), py::arg("seed"), py::arg("policy") = WalkPolicy::Uniform,
      py::arg("runs") = 100, py::arg("intervals") = 100);

  m.def(
      "run_figure",
      [](const std::string& id, std::uint64_t seed, std::optional<std::size_t> runs,
         std::optional<std::size_t> intervals, std::optional<std::uint64_t> steps, std::optional<std::size_t> n) {
        const auto figure = parse_figure_id(id);
        if (!figure) throw py::value_error("unknown figure id " + id);
        auto params = default_params(*figure);
        if (runs) params.runs = *runs;
        if (intervals) params.intervals = *intervals;
        if (steps) params.steps = *steps;
        if (n) {
          params.n = *n;
          if (!params.sizes.empty()) params.sizes = {*n};
        }
        py::gil_scoped_release release;
        return run_figure(*figure, params, seed).table.str();
      },
      py::arg("id"), py::arg("seed"), py::arg("runs") = py::none(), py::arg("intervals") = py::none(),
      py::arg("steps") = py::none(), py::arg("n") = py::none());
}
