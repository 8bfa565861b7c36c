#include "spanforest/churn.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "spanforest/experiments.hpp"
#include "spanforest/forest.hpp"

namespace spanforest {

namespace {

std::uint64_t pair_key(VertexId a, VertexId b) {
  const auto lo = std::min(a.value, b.value);
  const auto hi = std::max(a.value, b.value);
  return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

void count_rules(std::span<const AppliedRule> rules, ChurnSample& sample) {
  for (const auto& r : rules) {
    if (r.rule == Rule::Regenerate) ++sample.regenerations;
  }
}

}  // namespace

ChurnTrace churn_driver(World& world, std::span<const TopologyEvent> schedule, const ChurnOptions& options,
                        Rng& rng) {
  std::vector<TopologyEvent> events(schedule.begin(), schedule.end());
  std::stable_sort(events.begin(), events.end(),
                   [](const TopologyEvent& a, const TopologyEvent& b) { return a.tick < b.tick; });

  ChurnTrace trace;
  auto sample_now = [&](ChurnSample sample) {
    sample.tokens = world.tokens().size();
    sample.components = count_components(world.graph());
    trace.samples.push_back(sample);
    if (options.observer) options.observer(world, trace.samples.back());
  };
  auto check = [&](std::uint64_t tick) {
    if (!options.check_invariants) return;
    for (auto& message : check_forest(world)) {
      trace.violations.push_back("tick " + std::to_string(tick) + ": " + message);
    }
  };

  const SchedulerOptions scheduler{options.policy, true};
  StepReport report;
  std::size_t next = 0;
  for (std::uint64_t tick = 0; tick < options.rounds; ++tick) {
    if (next < events.size() && events[next].tick <= tick) {
      world.set_clock(std::max(tick, world.graph().clock()));
      ChurnSample sample{tick, ChurnPhase::Events};
      std::vector<VertexPair> removals;
      for (; next < events.size() && events[next].tick <= tick; ++next) {
        const auto& e = events[next];
        if (e.op == TopologyOp::AddEdge) {
          world.add_edge(e.u, e.v);
        } else {
          if (!world.graph().contains(e.u) || !world.graph().contains(e.v) || !world.graph().find_edge(e.u, e.v)) {
            throw GraphError("churn event removes absent edge (" + std::to_string(e.u.value) + "," +
                             std::to_string(e.v.value) + ")");
          }
          removals.emplace_back(e.u, e.v);
        }
      }
      if (!removals.empty()) count_rules(world.remove_edges(removals), sample);
      sample_now(sample);
      check(tick);
    }

    scheduler_step(world, scheduler, rng, report);
    ChurnSample sample{tick, ChurnPhase::Round};
    sample.merges = report.count(Rule::Merge);
    sample.moves = report.moves();
    trace.moves += sample.moves;
    trace.rounds = tick + 1;
    sample_now(sample);
    check(tick);

    const auto& last = trace.samples.back();
    trace.quiescent = next == events.size() && last.tokens == last.components;
    if (options.stop_when_quiescent && trace.quiescent) break;
  }
  return trace;
}

std::string to_json_line(const ChurnSample& sample) {
  nlohmann::ordered_json j;
  j["tick"] = sample.tick;
  j["phase"] = sample.phase == ChurnPhase::Events ? "events" : "round";
  j["tokens"] = sample.tokens;
  j["components"] = sample.components;
  j["r1"] = sample.regenerations;
  j["r3"] = sample.merges;
  j["r4"] = sample.moves;
  return j.dump();
}

void write_churn_trace(std::ostream& out, const ChurnTrace& trace) {
  for (const auto& s : trace.samples) out << to_json_line(s) << '\n';
}

std::vector<TopologyEvent> random_churn_schedule(const DynamicGraph& graph, std::uint64_t ticks,
                                                 std::size_t max_events_per_tick, Rng& rng) {
  const auto n = graph.vertex_count();
  if (n < 2) throw std::invalid_argument("churn needs at least two vertices");
  std::set<std::uint64_t> present;
  std::vector<VertexPair> present_list;
  for (const auto e : graph.present_edges()) {
    const auto [u, v] = graph.endpoints(e);
    present.insert(pair_key(u, v));
    present_list.emplace_back(u, v);
  }
  std::vector<TopologyEvent> out;
  for (std::uint64_t tick = 0; tick < ticks; ++tick) {
    const auto count = uniform_index(rng, max_events_per_tick + 1);
    std::set<std::uint64_t> touched;
    for (std::size_t i = 0; i < count; ++i) {
      const bool remove = !present_list.empty() && uniform_index(rng, 2) == 0;
      if (remove) {
        const auto at = uniform_index(rng, present_list.size());
        const auto [u, v] = present_list[at];
        if (!touched.insert(pair_key(u, v)).second) continue;
        present.erase(pair_key(u, v));
        present_list[at] = present_list.back();
        present_list.pop_back();
        out.push_back({tick, TopologyOp::RemoveEdge, u, v});
      } else {
        const VertexId u{static_cast<std::uint32_t>(uniform_index(rng, n))};
        const VertexId v{static_cast<std::uint32_t>(uniform_index(rng, n))};
        if (u == v || present.contains(pair_key(u, v)) || !touched.insert(pair_key(u, v)).second) continue;
        present.insert(pair_key(u, v));
        present_list.emplace_back(u, v);
        out.push_back({tick, TopologyOp::AddEdge, u, v});
      }
    }
  }
  return out;
}

DynamicGraph random_connected_graph(std::size_t n, std::size_t extra_edges, Rng& rng) {
  const auto tree = random_tree(n, rng);
  DynamicGraph graph;
  for (std::size_t i = 0; i < n; ++i) graph.add_vertex();
  for (const auto& [a, b] : tree.edges()) graph.add_edge(a, b);
  const auto max_edges = n * (n - 1) / 2;
  const auto target = std::min(max_edges, graph.edge_count() + extra_edges);
  while (graph.edge_count() < target) {
    const VertexId u{static_cast<std::uint32_t>(uniform_index(rng, n))};
    const VertexId v{static_cast<std::uint32_t>(uniform_index(rng, n))};
    if (u != v && !graph.find_edge(u, v)) graph.add_edge(u, v);
  }
  return graph;
}

}  // namespace spanforest
