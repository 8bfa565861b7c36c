#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spanforest/graph.hpp"
#include "spanforest/random.hpp"
#include "spanforest/tree.hpp"

namespace spanforest {

enum class WalkPolicy : std::uint8_t { Uniform, NonBacktracking };

std::string_view to_string(WalkPolicy policy);
/// Accepts "uniform" and "nobacktrack".
std::optional<WalkPolicy> parse_walk_policy(std::string_view text);

struct TokenId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(TokenId, TokenId) = default;
};

struct Token {
  TokenId id;
  VertexId position;
  // Vertex the token last came from; empty after a merge or regeneration.
  std::optional<VertexId> memory;
};

enum class Rule : std::uint8_t { Regenerate, Cleanup, Merge, Circulate };

std::string_view to_string(Rule rule);

struct AppliedRule {
  Rule rule;
  VertexId vertex;

  friend bool operator==(const AppliedRule&, const AppliedRule&) = default;
};

struct Activation {
  TokenId token;
  VertexId vertex;  // token position when activated
  std::optional<Rule> fired;
  bool meeting = false;  // merge was applicable when the token was activated
};

struct StepReport {
  std::uint64_t round = 0;
  std::vector<Activation> activations;

  [[nodiscard]] std::size_t count(Rule rule) const;
  [[nodiscard]] std::size_t moves() const { return count(Rule::Circulate); }
  [[nodiscard]] std::size_t meetings() const;
};

std::string to_json_line(const StepReport& report);

struct SchedulerOptions {
  WalkPolicy policy = WalkPolicy::Uniform;
  // When false, an applicable merge is only reported as a meeting and the
  // token circulates instead. Used to measure recurrence on a fixed pair of
  // trees.
  bool merge = true;
};

/// Graph plus token bookkeeping for one simulation run.
class World {
 public:
  /// Takes a graph in the initial labelling (every vertex T, every port
  /// empty) and creates one token per vertex in insertion order.
  explicit World(DynamicGraph graph);
  /// Same, with tokens created in `token_order` (a permutation of all
  /// vertices). Token creation order fixes the order the scheduler shuffles.
  World(DynamicGraph graph, std::span<const VertexId> token_order);

  [[nodiscard]] const DynamicGraph& graph() const { return graph_; }
  [[nodiscard]] std::span<const Token> tokens() const { return tokens_; }
  [[nodiscard]] const Token* token_at(VertexId v) const;
  [[nodiscard]] const Token* find_token(TokenId id) const;
  [[nodiscard]] std::uint64_t round() const { return round_; }

  /// New isolated T vertex carrying a fresh token.
  VertexId add_vertex();
  /// Topology event: plain edge with empty ports. No rule fires.
  AdditionRecord add_edge(VertexId u, VertexId v);
  /// Topology event: removes the edge and fires r1/r2 at both endpoints.
  std::vector<AppliedRule> remove_edge(VertexId u, VertexId v);
  /// Topology half of remove_edge: the edge disappears and its record is
  /// returned unprocessed. Pass it to handle_topology_event (or to the rule
  /// functions) before the next scheduler step.
  RemovalRecord detach_edge(VertexId u, VertexId v);
  /// Removes all edges first, then processes every removal record, as for
  /// simultaneous losses within one tick.
  std::vector<AppliedRule> remove_edges(std::span<const VertexPair> edges);

  /// Labels an existing set of singleton trees as one tree rooted at `root`
  /// (as if built by merges): tree-edge ports oriented toward the root, one
  /// token at the root with empty memory.
  void install_tree(const TreeSnapshot& tree, VertexId root);
  void set_clock(std::uint64_t tick);

 private:
  friend bool rule_r3_merge(World&, VertexId, VertexId);
  friend bool rule_r4_circulate(World&, VertexId, VertexId);
  friend bool rule_r1_regenerate(World&, VertexId, const RemovalRecord&);
  friend bool rule_r2_cleanup(World&, VertexId, const RemovalRecord&);
  friend void scheduler_step(World&, const SchedulerOptions&, Rng&, StepReport&);

  Token& create_token(VertexId at);
  void destroy_token(VertexId at);
  Token* mutable_token_at(VertexId v);

  DynamicGraph graph_;
  std::vector<Token> tokens_;
  std::vector<std::int32_t> slot_by_vertex_;
  std::uint32_t next_token_id_ = 0;
  std::uint64_t round_ = 0;
  std::vector<TokenId> order_;
};

/// r3: `actor` and `peer` both hold tokens and share an empty-port edge.
/// `actor` keeps its token (memory cleared), `peer` becomes N, and the edge
/// becomes a tree edge oriented toward `actor`. Returns false without
/// touching state when the preconditions fail.
bool rule_r3_merge(World& world, VertexId actor, VertexId peer);

/// r4: hands the token from `actor` to tree-neighbor `target` and swaps the
/// orientation of their edge.
bool rule_r4_circulate(World& world, VertexId actor, VertexId target);

/// r1: `v` lost the edge that carried its port 1, so it roots an orphaned
/// subtree and regenerates a token there.
bool rule_r1_regenerate(World& world, VertexId v, const RemovalRecord& lost);

/// r2: `v` lost an edge whose local port was 2 or empty. Only the stale port
/// entry goes away; the vertex label is unchanged.
bool rule_r2_cleanup(World& world, VertexId v, const RemovalRecord& lost);

/// Next position of `token`, or nothing when its vertex has no tree edge.
std::optional<VertexId> choose_move(const World& world, const Token& token, WalkPolicy policy, Rng& rng);

/// One round: every token is activated once, in a freshly shuffled order.
/// An activated token merges with the first token-holding neighbour across an
/// empty-port edge if there is one, otherwise it circulates.
void scheduler_step(World& world, const SchedulerOptions& options, Rng& rng, StepReport& report);
StepReport scheduler_step(World& world, const SchedulerOptions& options, Rng& rng);

std::vector<AppliedRule> handle_topology_event(World& world, const RemovalRecord& record);
std::vector<AppliedRule> handle_topology_event(World& world, const AdditionRecord& record);

}  // namespace spanforest
