#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spanforest/analysis.hpp"
#include "spanforest/graph.hpp"
#include "spanforest/protocol.hpp"
#include "spanforest/random.hpp"
#include "spanforest/tree.hpp"

namespace spanforest {

/// Uniform random labelled tree on vertices first..first+n-1, decoded from a
/// uniform Prüfer sequence of length n-2.
TreeSnapshot random_tree(std::size_t n, Rng& rng, std::uint32_t first = 0);

/// k distinct (tree1, tree2) vertex pairs drawn uniformly without replacement.
BridgeSet wire_bridges(const TreeSnapshot& t1, const TreeSnapshot& t2, std::size_t k, Rng& rng);

struct Scenario {
  std::size_t n1 = 50;
  std::size_t n2 = 50;
  std::size_t k = 1;
  std::uint64_t seed = 0;
  std::vector<TopologyEvent> churn;
};

/// A materialised scenario: the first tree occupies vertices [0, n1), the
/// second [n1, n1+n2).
struct Instance {
  TreeSnapshot tree1;
  TreeSnapshot tree2;
  BridgeSet bridges;
  VertexId start1;
  VertexId start2;

  /// Initial-state graph (all T, empty ports) holding both trees' edges and
  /// the bridges.
  [[nodiscard]] DynamicGraph build_graph() const;
  /// build_graph() with both trees installed and tokens on the start vertices.
  [[nodiscard]] World build_world() const;
};

Instance generate_instance(std::size_t n1, std::size_t n2, std::size_t k, std::uint64_t seed);

/// Builds a world whose single tree is `tree` (vertices must be 0..n-1),
/// token at `root`.
World world_for_tree(const TreeSnapshot& tree, VertexId root);

struct RunStats {
  // Counted in token moves; with two tokens a round is two moves.
  std::uint64_t first_meeting_moves = 0;
  std::uint64_t first_meeting_rounds = 0;
  std::vector<std::uint64_t> inter_meeting_moves;
  std::uint64_t moves_total = 0;
  std::uint64_t rounds_total = 0;
  double fusion_time = 0.0;  // closed-form expectation for the run's instance
  bool invariants_ok = true;

  [[nodiscard]] double inter_meeting_mean() const;
  [[nodiscard]] double meeting_rate() const;
};

struct Estimate {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t samples = 0;
};

/// Sample mean with a 95% normal-approximation interval.
Estimate mean_estimate(std::span<const double> values);

struct MeetingOptions {
  std::size_t runs = 1000;
  std::size_t min_intervals = 100;
  std::size_t burn_in_rounds_per_vertex = 10;
  bool regenerate_instances = true;
  bool measure_recurrence = true;
  bool check_invariants = true;
  std::uint64_t max_moves = 20'000'000'000ULL;
};

struct MeetingSummary {
  std::vector<RunStats> runs;
  Estimate first_meeting;
  // Reciprocal of the mean per-run meeting rate, i.e. moves per meeting with
  // every run weighted by observation time.
  std::optional<Estimate> inter_meeting;
  Estimate fusion_time;         // closed form, averaged over instances
  double pooled_fusion_time = 0.0;  // 1 / mean fusion probability
  std::size_t invariant_failures = 0;
};

/// One run on a fixed instance, merging disabled: tokens start on the
/// instance's start vertices, the first meeting is timed from move 0, and
/// after a burn-in of burn_in_rounds_per_vertex * max(n1, n2) rounds at least
/// min_intervals inter-meeting intervals are collected.
RunStats simulate_meeting(const Instance& instance, WalkPolicy policy, const MeetingOptions& options,
                          std::uint64_t seed);

/// Repeats simulate_meeting over runs. Run r uses instance seed
/// derive_seed(derive_seed(seed, r), 0) (or the scenario seed itself when
/// instances are not regenerated) and walk seed derive_seed(derive_seed(seed,
/// r), 1), so two policies measured on the same scenario share instances and
/// starts.
MeetingSummary measure_meeting(const Scenario& scenario, WalkPolicy policy, const MeetingOptions& options);

struct VisitTrace {
  TreeSnapshot tree;
  VertexId start;
  VertexId target;
  std::uint64_t steps = 0;
  std::vector<std::uint64_t> ticks;      // tick t = position after t moves
  std::vector<std::uint64_t> occupancy;  // per vertex, over ticks 1..steps

  [[nodiscard]] std::vector<std::uint64_t> gaps() const;
  [[nodiscard]] double gap_mean() const;
  [[nodiscard]] double gap_cv() const;
};

VisitTrace visit_trace(const TreeSnapshot& tree, WalkPolicy policy, std::uint64_t steps, VertexId start,
                       VertexId target, std::uint64_t seed);
/// Random n-vertex tree with uniformly chosen start and target.
VisitTrace visit_trace(std::size_t n, WalkPolicy policy, std::uint64_t steps, std::uint64_t seed);

}  // namespace spanforest
