#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spanforest/graph.hpp"
#include "spanforest/protocol.hpp"
#include "spanforest/random.hpp"

namespace spanforest {

struct ChurnSample;

struct ChurnOptions {
  WalkPolicy policy = WalkPolicy::Uniform;
  std::uint64_t rounds = 1000;
  bool check_invariants = true;
  // Stop early once the schedule is exhausted and every connected component
  // holds a single tree.
  bool stop_when_quiescent = false;
  // Called after every event batch and every round, once the sample is taken.
  std::function<void(const World&, const ChurnSample&)> observer;
};

enum class ChurnPhase : std::uint8_t { Events, Round };

struct ChurnSample {
  std::uint64_t tick = 0;
  ChurnPhase phase = ChurnPhase::Round;
  std::size_t tokens = 0;
  std::size_t components = 0;
  std::size_t regenerations = 0;  // r1 firings in this sample
  std::size_t merges = 0;         // r3 firings in this sample
  std::size_t moves = 0;          // r4 firings in this sample
};

struct ChurnTrace {
  std::vector<ChurnSample> samples;
  std::vector<std::string> violations;  // "tick N: message"
  std::uint64_t rounds = 0;
  std::uint64_t moves = 0;
  bool quiescent = false;
};

/// Runs the scheduler for options.rounds rounds. Before round t every event
/// with tick <= t is applied: additions first, then all removals of the tick
/// at once (simultaneous losses), followed by r1/r2 at every endpoint.
/// Throws GraphError when an event names an absent edge or unknown vertex.
ChurnTrace churn_driver(World& world, std::span<const TopologyEvent> schedule, const ChurnOptions& options, Rng& rng);

// One JSON object per sample:
// {"tick":4,"phase":"round","tokens":3,"components":1,"r1":0,"r3":1,"r4":2}
std::string to_json_line(const ChurnSample& sample);
void write_churn_trace(std::ostream& out, const ChurnTrace& trace);

/// Random edge toggles over `ticks` ticks starting from the topology of
/// `graph`: each tick carries up to max_events_per_tick events on distinct
/// vertex pairs, each a removal of a present edge or an addition of an absent
/// one with equal probability.
std::vector<TopologyEvent> random_churn_schedule(const DynamicGraph& graph, std::uint64_t ticks,
                                                 std::size_t max_events_per_tick, Rng& rng);

/// Connected random graph on n vertices: a uniform random spanning tree plus
/// `extra_edges` distinct additional edges, every vertex in the initial
/// labelling.
DynamicGraph random_connected_graph(std::size_t n, std::size_t extra_edges, Rng& rng);

}  // namespace spanforest
