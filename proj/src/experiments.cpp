#include "spanforest/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

#include "spanforest/forest.hpp"
#include "spanforest/parallel.hpp"

namespace spanforest {

TreeSnapshot random_tree(std::size_t n, Rng& rng, std::uint32_t first) {
  if (n == 0) throw std::invalid_argument("random_tree needs n >= 1");
  std::vector<VertexId> vertices;
  vertices.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) vertices.push_back(VertexId{first + i});
  std::vector<VertexPair> edges;
  if (n == 1) return TreeSnapshot::from_edges(std::move(vertices), {});

  std::vector<std::size_t> code(n - 2);
  for (auto& c : code) c = uniform_index(rng, n);

  std::vector<std::size_t> degree(n, 1);
  for (const auto c : code) ++degree[c];
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> leaves;
  for (std::size_t i = 0; i < n; ++i) {
    if (degree[i] == 1) leaves.push(i);
  }
  for (const auto c : code) {
    const auto leaf = leaves.top();
    leaves.pop();
    edges.emplace_back(vertices[leaf], vertices[c]);
    if (--degree[c] == 1) leaves.push(c);
  }
  const auto a = leaves.top();
  leaves.pop();
  const auto b = leaves.top();
  edges.emplace_back(vertices[a], vertices[b]);
  return TreeSnapshot::from_edges(std::move(vertices), std::move(edges));
}

BridgeSet wire_bridges(const TreeSnapshot& t1, const TreeSnapshot& t2, std::size_t k, Rng& rng) {
  const std::size_t pairs = t1.size() * t2.size();
  if (k > pairs) {
    throw std::invalid_argument("cannot wire " + std::to_string(k) + " bridges between trees with only " +
                                std::to_string(pairs) + " cross pairs");
  }
  // Partial Fisher-Yates over the n1*n2 cross pairs.
  std::vector<std::size_t> index(pairs);
  std::iota(index.begin(), index.end(), std::size_t{0});
  BridgeSet bridges;
  bridges.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + uniform_index(rng, pairs - i);
    std::swap(index[i], index[j]);
    bridges.push_back({t1.vertices()[index[i] / t2.size()], t2.vertices()[index[i] % t2.size()]});
  }
  return bridges;
}

DynamicGraph Instance::build_graph() const {
  DynamicGraph graph;
  for (std::size_t i = 0; i < tree1.size() + tree2.size(); ++i) graph.add_vertex();
  for (const auto& [a, b] : tree1.edges()) graph.add_edge(a, b);
  for (const auto& [a, b] : tree2.edges()) graph.add_edge(a, b);
  for (const auto& bridge : bridges) graph.add_edge(bridge.u, bridge.v);
  return graph;
}

World Instance::build_world() const {
  World world(build_graph());
  world.install_tree(tree1, start1);
  world.install_tree(tree2, start2);
  return world;
}

Instance generate_instance(std::size_t n1, std::size_t n2, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  Instance instance;
  instance.tree1 = random_tree(n1, rng, 0);
  instance.tree2 = random_tree(n2, rng, static_cast<std::uint32_t>(n1));
  instance.bridges = wire_bridges(instance.tree1, instance.tree2, k, rng);
  instance.start1 = instance.tree1.vertices()[uniform_index(rng, n1)];
  instance.start2 = instance.tree2.vertices()[uniform_index(rng, n2)];
  return instance;
}

World world_for_tree(const TreeSnapshot& tree, VertexId root) {
  for (const auto v : tree.vertices()) {
    if (v.value >= tree.size()) throw std::invalid_argument("world_for_tree needs vertices 0..n-1");
  }
  DynamicGraph graph;
  for (std::size_t i = 0; i < tree.size(); ++i) graph.add_vertex();
  for (const auto& [a, b] : tree.edges()) graph.add_edge(a, b);
  World world(std::move(graph));
  world.install_tree(tree, root);
  return world;
}

double RunStats::inter_meeting_mean() const {
  if (inter_meeting_moves.empty()) return std::nan("");
  const auto total = std::accumulate(inter_meeting_moves.begin(), inter_meeting_moves.end(), std::uint64_t{0});
  return static_cast<double>(total) / static_cast<double>(inter_meeting_moves.size());
}

double RunStats::meeting_rate() const {
  const auto total = std::accumulate(inter_meeting_moves.begin(), inter_meeting_moves.end(), std::uint64_t{0});
  if (total == 0) return std::nan("");
  return static_cast<double>(inter_meeting_moves.size()) / static_cast<double>(total);
}

Estimate mean_estimate(std::span<const double> values) {
  Estimate e;
  e.samples = values.size();
  if (values.empty()) return e;
  const double n = static_cast<double>(values.size());
  e.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (const double v : values) ss += (v - e.mean) * (v - e.mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  const double half = 1.959963984540054 * sd / std::sqrt(n);
  e.ci_low = e.mean - half;
  e.ci_high = e.mean + half;
  return e;
}

RunStats simulate_meeting(const Instance& instance, WalkPolicy policy, const MeetingOptions& options,
                          std::uint64_t seed) {
  if (instance.tree1.size() < 2 || instance.tree2.size() < 2) {
    throw std::invalid_argument("meeting measurement needs trees of at least two vertices");
  }
  if (instance.bridges.empty()) throw std::invalid_argument("meeting measurement needs at least one bridge");

  World world = instance.build_world();
  Rng rng(seed);
  const SchedulerOptions scheduler{policy, /*merge=*/false};
  const std::uint64_t burn_in_rounds =
      options.burn_in_rounds_per_vertex * std::max(instance.tree1.size(), instance.tree2.size());

  RunStats stats;
  stats.fusion_time = *expected_fusion_time(instance.tree1, instance.tree2, instance.bridges);
  StepReport report;
  std::uint64_t moves = 0;
  bool met = false;
  std::optional<std::uint64_t> last_meeting;
  bool done = false;
  while (!done) {
    scheduler_step(world, scheduler, rng, report);
    for (const auto& activation : report.activations) {
      if (activation.meeting && !done) {
        if (!met) {
          met = true;
          stats.first_meeting_moves = moves;
          stats.first_meeting_rounds = report.round;
          if (!options.measure_recurrence) done = true;
        }
        if (!done && report.round >= burn_in_rounds) {
          if (last_meeting) stats.inter_meeting_moves.push_back(moves - *last_meeting);
          last_meeting = moves;
          if (stats.inter_meeting_moves.size() >= options.min_intervals) done = true;
        }
      }
      if (activation.fired == Rule::Circulate) ++moves;
    }
    if (moves > options.max_moves) throw std::runtime_error("meeting run exceeded its move budget");
  }
  stats.moves_total = moves;
  stats.rounds_total = world.round();
  if (options.check_invariants) stats.invariants_ok = check_forest(world).empty() && world.tokens().size() == 2;
  return stats;
}

MeetingSummary measure_meeting(const Scenario& scenario, WalkPolicy policy, const MeetingOptions& options) {
  if (scenario.k == 0) throw std::invalid_argument("meeting measurement needs at least one bridge");
  if (options.runs == 0) throw std::invalid_argument("meeting measurement needs at least one run");

  MeetingSummary summary;
  summary.runs.resize(options.runs);
  std::vector<double> probabilities(options.runs);
  std::optional<Instance> fixed;
  if (!options.regenerate_instances) fixed = generate_instance(scenario.n1, scenario.n2, scenario.k, scenario.seed);

  parallel_for(options.runs, [&](std::size_t r) {
    const auto run_seed = derive_seed(scenario.seed, r);
    const Instance instance =
        fixed ? *fixed : generate_instance(scenario.n1, scenario.n2, scenario.k, derive_seed(run_seed, 0));
    summary.runs[r] = simulate_meeting(instance, policy, options, derive_seed(run_seed, 1));
    probabilities[r] = fusion_probability(instance.tree1, instance.tree2, instance.bridges);
  });

  std::vector<double> first;
  std::vector<double> fusion;
  std::vector<double> rates;
  for (const auto& run : summary.runs) {
    first.push_back(static_cast<double>(run.first_meeting_moves));
    fusion.push_back(run.fusion_time);
    if (!run.inter_meeting_moves.empty()) rates.push_back(run.meeting_rate());
    if (!run.invariants_ok) ++summary.invariant_failures;
  }
  summary.first_meeting = mean_estimate(first);
  summary.fusion_time = mean_estimate(fusion);
  summary.pooled_fusion_time =
      static_cast<double>(probabilities.size()) / std::accumulate(probabilities.begin(), probabilities.end(), 0.0);

  if (options.measure_recurrence && !rates.empty()) {
    Estimate inter;
    if (summary.runs.size() == 1) {
      std::vector<double> gaps(summary.runs.front().inter_meeting_moves.begin(),
                               summary.runs.front().inter_meeting_moves.end());
      inter = mean_estimate(gaps);
    } else {
      const auto rate = mean_estimate(rates);
      inter.samples = rate.samples;
      inter.mean = 1.0 / rate.mean;
      inter.ci_low = 1.0 / rate.ci_high;
      inter.ci_high = rate.ci_low > 0.0 ? 1.0 / rate.ci_low : std::numeric_limits<double>::infinity();
    }
    summary.inter_meeting = inter;
  }
  return summary;
}

std::vector<std::uint64_t> VisitTrace::gaps() const {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 1; i < ticks.size(); ++i) out.push_back(ticks[i] - ticks[i - 1]);
  return out;
}

double VisitTrace::gap_mean() const {
  const auto g = gaps();
  if (g.empty()) return std::nan("");
  return static_cast<double>(std::accumulate(g.begin(), g.end(), std::uint64_t{0})) / static_cast<double>(g.size());
}

double VisitTrace::gap_cv() const {
  const auto g = gaps();
  if (g.size() < 2) return std::nan("");
  const double mean = gap_mean();
  double ss = 0.0;
  for (const auto x : g) ss += (static_cast<double>(x) - mean) * (static_cast<double>(x) - mean);
  return std::sqrt(ss / static_cast<double>(g.size())) / mean;
}

VisitTrace visit_trace(const TreeSnapshot& tree, WalkPolicy policy, std::uint64_t steps, VertexId start,
                       VertexId target, std::uint64_t seed) {
  if (!tree.contains(target)) throw std::invalid_argument("target is not in the tree");
  World world = world_for_tree(tree, start);
  Rng rng(seed);
  VisitTrace trace;
  trace.tree = tree;
  trace.start = start;
  trace.target = target;
  trace.steps = steps;
  trace.occupancy.assign(tree.size(), 0);
  if (start == target) trace.ticks.push_back(0);

  const SchedulerOptions scheduler{policy, true};
  StepReport report;
  std::uint64_t tick = 0;
  while (tick < steps) {
    scheduler_step(world, scheduler, rng, report);
    if (report.moves() == 0) break;  // singleton tree
    ++tick;
    const auto at = world.tokens().front().position;
    ++trace.occupancy[at.value];
    if (at == target) trace.ticks.push_back(tick);
  }
  return trace;
}

VisitTrace visit_trace(std::size_t n, WalkPolicy policy, std::uint64_t steps, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0));
  const auto tree = random_tree(n, rng);
  const auto start = tree.vertices()[uniform_index(rng, n)];
  const auto target = tree.vertices()[uniform_index(rng, n)];
  return visit_trace(tree, policy, steps, start, target, derive_seed(seed, 1));
}

}  // namespace spanforest
