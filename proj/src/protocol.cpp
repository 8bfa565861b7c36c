#include "spanforest/protocol.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace spanforest {

std::string_view to_string(WalkPolicy policy) {
  return policy == WalkPolicy::Uniform ? "uniform" : "nobacktrack";
}

std::optional<WalkPolicy> parse_walk_policy(std::string_view text) {
  if (text == "uniform") return WalkPolicy::Uniform;
  if (text == "nobacktrack") return WalkPolicy::NonBacktracking;
  return std::nullopt;
}

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::Regenerate:
      return "r1";
    case Rule::Cleanup:
      return "r2";
    case Rule::Merge:
      return "r3";
    case Rule::Circulate:
      return "r4";
  }
  return "?";
}

std::size_t StepReport::count(Rule rule) const {
  return static_cast<std::size_t>(
      std::count_if(activations.begin(), activations.end(), [rule](const Activation& a) { return a.fired == rule; }));
}

std::size_t StepReport::meetings() const {
  return static_cast<std::size_t>(
      std::count_if(activations.begin(), activations.end(), [](const Activation& a) { return a.meeting; }));
}

std::string to_json_line(const StepReport& report) {
  nlohmann::ordered_json j;
  j["round"] = report.round;
  j["r3"] = report.count(Rule::Merge);
  j["r4"] = report.count(Rule::Circulate);
  j["meetings"] = report.meetings();
  auto& acts = j["activations"] = nlohmann::ordered_json::array();
  for (const auto& a : report.activations) {
    nlohmann::ordered_json entry;
    entry["token"] = a.token.value;
    entry["vertex"] = a.vertex.value;
    entry["rule"] = a.fired ? nlohmann::ordered_json(to_string(*a.fired)) : nlohmann::ordered_json(nullptr);
    entry["meeting"] = a.meeting;
    acts.push_back(std::move(entry));
  }
  return j.dump();
}

World::World(DynamicGraph graph) : graph_(std::move(graph)) {
  if (graph_.stale_port_count() != 0) throw std::invalid_argument("graph has unprocessed edge removals");
  for (std::uint32_t i = 0; i < graph_.vertex_count(); ++i) {
    if (graph_.label(VertexId{i}) != VertexLabel::T) throw std::invalid_argument("initial graph must label every vertex T");
  }
  for (const auto e : graph_.present_edges()) {
    const auto [u, v] = graph_.endpoints(e);
    if (graph_.port(e, u) != PortLabel::NonTree || graph_.port(e, v) != PortLabel::NonTree) {
      throw std::invalid_argument("initial graph must have empty port labels");
    }
  }
  slot_by_vertex_.assign(graph_.vertex_count(), -1);
  for (std::uint32_t i = 0; i < graph_.vertex_count(); ++i) create_token(VertexId{i});
}

World::World(DynamicGraph graph, std::span<const VertexId> token_order) : World(std::move(graph)) {
  if (token_order.size() != tokens_.size()) throw std::invalid_argument("token order must list every vertex once");
  tokens_.clear();
  slot_by_vertex_.assign(graph_.vertex_count(), -1);
  next_token_id_ = 0;
  for (const auto v : token_order) {
    if (!graph_.contains(v) || token_at(v) != nullptr) {
      throw std::invalid_argument("token order must list every vertex once");
    }
    create_token(v);
  }
}

const Token* World::token_at(VertexId v) const {
  if (v.value >= slot_by_vertex_.size()) return nullptr;
  const auto slot = slot_by_vertex_[v.value];
  return slot < 0 ? nullptr : &tokens_[static_cast<std::size_t>(slot)];
}

Token* World::mutable_token_at(VertexId v) { return const_cast<Token*>(std::as_const(*this).token_at(v)); }

const Token* World::find_token(TokenId id) const {
  for (const auto& t : tokens_) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

Token& World::create_token(VertexId at) {
  if (token_at(at) != nullptr) throw std::logic_error("vertex already holds a token");
  tokens_.push_back(Token{TokenId{next_token_id_++}, at, std::nullopt});
  slot_by_vertex_[at.value] = static_cast<std::int32_t>(tokens_.size() - 1);
  return tokens_.back();
}

void World::destroy_token(VertexId at) {
  const auto slot = slot_by_vertex_[at.value];
  if (slot < 0) throw std::logic_error("no token to destroy");
  tokens_.erase(tokens_.begin() + slot);
  slot_by_vertex_[at.value] = -1;
  for (std::size_t i = static_cast<std::size_t>(slot); i < tokens_.size(); ++i) {
    slot_by_vertex_[tokens_[i].position.value] = static_cast<std::int32_t>(i);
  }
}

VertexId World::add_vertex() {
  const auto v = graph_.add_vertex();
  slot_by_vertex_.push_back(-1);
  create_token(v);
  return v;
}

AdditionRecord World::add_edge(VertexId u, VertexId v) {
  const auto e = graph_.add_edge(u, v);
  return AdditionRecord{e, u, v, graph_.clock()};
}

std::vector<AppliedRule> World::remove_edge(VertexId u, VertexId v) {
  const auto record = graph_.remove_edge(u, v);
  return handle_topology_event(*this, record);
}

RemovalRecord World::detach_edge(VertexId u, VertexId v) { return graph_.remove_edge(u, v); }

std::vector<AppliedRule> World::remove_edges(std::span<const VertexPair> edges) {
  std::vector<EdgeId> ids;
  ids.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    const auto e = graph_.find_edge(u, v);
    if (!e) throw GraphError("edge (" + std::to_string(u.value) + "," + std::to_string(v.value) + ") is absent");
    if (std::find(ids.begin(), ids.end(), *e) != ids.end()) throw GraphError("edge listed twice in one removal");
    ids.push_back(*e);
  }
  std::vector<RemovalRecord> records;
  records.reserve(ids.size());
  for (const auto e : ids) records.push_back(graph_.remove_edge(e));
  std::vector<AppliedRule> applied;
  for (const auto& record : records) {
    auto rules = handle_topology_event(*this, record);
    applied.insert(applied.end(), rules.begin(), rules.end());
  }
  return applied;
}

void World::install_tree(const TreeSnapshot& tree, VertexId root) {
  if (!tree.contains(root)) throw std::invalid_argument("root is not in the tree");
  for (const auto v : tree.vertices()) {
    if (graph_.label(v) != VertexLabel::T || token_at(v) == nullptr) {
      throw std::invalid_argument("install_tree needs singleton trees");
    }
  }
  std::vector<EdgeId> edge_ids;
  for (const auto& [a, b] : tree.edges()) {
    const auto e = graph_.find_edge(a, b);
    if (!e) throw std::invalid_argument("tree edge is not present in the graph");
    if (graph_.port(*e, a) != PortLabel::NonTree || graph_.port(*e, b) != PortLabel::NonTree) {
      throw std::invalid_argument("tree edge already labelled");
    }
    edge_ids.push_back(*e);
  }

  std::deque<VertexId> queue{root};
  std::vector<bool> seen(tree.size(), false);
  seen[tree.index_of(root)] = true;
  while (!queue.empty()) {
    const auto parent = queue.front();
    queue.pop_front();
    for (const auto child : tree.neighbors(parent)) {
      const auto idx = tree.index_of(child);
      if (seen[idx]) continue;
      seen[idx] = true;
      const auto e = *graph_.find_edge(parent, child);
      graph_.set_port(e, parent, PortLabel::AwayFromToken);
      graph_.set_port(e, child, PortLabel::TowardToken);
      graph_.set_label(child, VertexLabel::N);
      destroy_token(child);
      queue.push_back(child);
    }
  }
  mutable_token_at(root)->memory.reset();
}

void World::set_clock(std::uint64_t tick) { graph_.advance_clock_to(tick); }

bool rule_r3_merge(World& world, VertexId actor, VertexId peer) {
  auto& g = world.graph_;
  if (actor == peer || g.label(actor) != VertexLabel::T || g.label(peer) != VertexLabel::T) return false;
  const auto e = g.find_edge(actor, peer);
  if (!e || g.port(*e, actor) != PortLabel::NonTree || g.port(*e, peer) != PortLabel::NonTree) return false;
  if (world.token_at(actor) == nullptr || world.token_at(peer) == nullptr) return false;

  g.set_port(*e, actor, PortLabel::AwayFromToken);
  g.set_port(*e, peer, PortLabel::TowardToken);
  g.set_label(peer, VertexLabel::N);
  world.destroy_token(peer);
  world.mutable_token_at(actor)->memory.reset();
  return true;
}

bool rule_r4_circulate(World& world, VertexId actor, VertexId target) {
  auto& g = world.graph_;
  if (g.label(actor) != VertexLabel::T || g.label(target) != VertexLabel::N) return false;
  const auto e = g.find_edge(actor, target);
  if (!e || g.port(*e, actor) != PortLabel::AwayFromToken || g.port(*e, target) != PortLabel::TowardToken) return false;
  Token* token = world.mutable_token_at(actor);
  if (token == nullptr) return false;

  g.set_label(actor, VertexLabel::N);
  g.set_label(target, VertexLabel::T);
  g.set_port(*e, actor, PortLabel::TowardToken);
  g.set_port(*e, target, PortLabel::AwayFromToken);
  token->position = target;
  token->memory = actor;
  world.slot_by_vertex_[target.value] = world.slot_by_vertex_[actor.value];
  world.slot_by_vertex_[actor.value] = -1;
  return true;
}

bool rule_r1_regenerate(World& world, VertexId v, const RemovalRecord& lost) {
  auto& g = world.graph_;
  if (!lost.touches(v) || !g.has_stale_port(v, lost.edge)) return false;
  if (g.label(v) != VertexLabel::N || lost.port_at(v) != PortLabel::TowardToken) return false;
  g.purge_port(v, lost.edge);
  g.set_label(v, VertexLabel::T);
  world.create_token(v);
  return true;
}

bool rule_r2_cleanup(World& world, VertexId v, const RemovalRecord& lost) {
  auto& g = world.graph_;
  if (!lost.touches(v) || !g.has_stale_port(v, lost.edge)) return false;
  if (lost.port_at(v) == PortLabel::TowardToken) return false;
  g.purge_port(v, lost.edge);
  if (Token* token = world.mutable_token_at(v); token != nullptr && token->memory == lost.other(v)) {
    token->memory.reset();
  }
  return true;
}

std::optional<VertexId> choose_move(const World& world, const Token& token, WalkPolicy policy, Rng& rng) {
  const auto& g = world.graph();
  const VertexId at = token.position;
  const auto incidences = g.incidences(at);

  std::size_t tree_degree = 0;
  bool memory_adjacent = false;
  for (const auto& inc : incidences) {
    if (g.port(inc.edge, at) == PortLabel::NonTree) continue;
    ++tree_degree;
    if (token.memory == inc.neighbor) memory_adjacent = true;
  }
  if (tree_degree == 0) return std::nullopt;

  // The reverse move is forbidden unless it is the only one (leaf).
  const bool exclude_memory = policy == WalkPolicy::NonBacktracking && memory_adjacent && tree_degree > 1;
  const std::size_t choices = exclude_memory ? tree_degree - 1 : tree_degree;
  std::size_t pick = choices == 1 ? 0 : uniform_index(rng, choices);
  for (const auto& inc : incidences) {
    if (g.port(inc.edge, at) == PortLabel::NonTree) continue;
    if (exclude_memory && token.memory == inc.neighbor) continue;
    if (pick-- == 0) return inc.neighbor;
  }
  return std::nullopt;
}

void scheduler_step(World& world, const SchedulerOptions& options, Rng& rng, StepReport& report) {
  const auto& g = world.graph_;
  report.round = world.round_;
  report.activations.clear();

  auto& order = world.order_;
  order.clear();
  for (const auto& t : world.tokens_) order.push_back(t.id);
  std::shuffle(order.begin(), order.end(), rng);

  for (const TokenId id : order) {
    const Token* token = world.find_token(id);
    if (token == nullptr) continue;  // merged away earlier in this round
    const VertexId at = token->position;
    Activation activation{id, at, std::nullopt, false};

    for (const auto& inc : g.incidences(at)) {
      if (g.label(inc.neighbor) != VertexLabel::T) continue;
      if (g.port(inc.edge, at) != PortLabel::NonTree || g.port(inc.edge, inc.neighbor) != PortLabel::NonTree) continue;
      activation.meeting = true;
      if (options.merge && rule_r3_merge(world, at, inc.neighbor)) activation.fired = Rule::Merge;
      break;
    }

    if (!activation.fired) {
      if (const auto target = choose_move(world, *token, options.policy, rng);
          target && rule_r4_circulate(world, at, *target)) {
        activation.fired = Rule::Circulate;
      }
    }
    report.activations.push_back(activation);
  }
  ++world.round_;
}

StepReport scheduler_step(World& world, const SchedulerOptions& options, Rng& rng) {
  StepReport report;
  scheduler_step(world, options, rng, report);
  return report;
}

std::vector<AppliedRule> handle_topology_event(World& world, const RemovalRecord& record) {
  std::vector<AppliedRule> applied;
  for (const VertexId end : {record.u, record.v}) {
    if (rule_r1_regenerate(world, end, record)) {
      applied.push_back({Rule::Regenerate, end});
    } else if (rule_r2_cleanup(world, end, record)) {
      applied.push_back({Rule::Cleanup, end});
    }
  }
  return applied;
}

std::vector<AppliedRule> handle_topology_event(World&, const AdditionRecord&) { return {}; }

}  // namespace spanforest
