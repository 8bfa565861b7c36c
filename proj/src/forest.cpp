#include "spanforest/forest.hpp"

#include <deque>
#include <string>

namespace spanforest {

namespace {

bool is_tree_edge(const DynamicGraph& g, EdgeId e, VertexId a, VertexId b) {
  const auto pa = g.port(e, a);
  const auto pb = g.port(e, b);
  return (pa == PortLabel::TowardToken && pb == PortLabel::AwayFromToken) ||
         (pa == PortLabel::AwayFromToken && pb == PortLabel::TowardToken);
}

std::string vtx(VertexId v) { return std::to_string(v.value); }

}  // namespace

ForestView ForestView::derive(const World& world) {
  const auto& g = world.graph();
  ForestView view;
  constexpr auto unassigned = static_cast<std::size_t>(-1);
  view.tree_of_.assign(g.vertex_count(), unassigned);

  for (std::uint32_t s = 0; s < g.vertex_count(); ++s) {
    if (view.tree_of_[s] != unassigned) continue;
    const auto index = view.trees_.size();
    TreeComponent component;
    std::deque<VertexId> queue{VertexId{s}};
    view.tree_of_[s] = index;
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      component.vertices.push_back(v);
      if (g.label(v) == VertexLabel::T) component.token_vertices.push_back(v);
      for (const auto& inc : g.incidences(v)) {
        if (!is_tree_edge(g, inc.edge, v, inc.neighbor)) continue;
        if (v < inc.neighbor) component.tree_edges.emplace_back(v, inc.neighbor);
        if (view.tree_of_[inc.neighbor.value] != unassigned) continue;
        view.tree_of_[inc.neighbor.value] = index;
        queue.push_back(inc.neighbor);
      }
    }
    view.trees_.push_back(std::move(component));
  }
  return view;
}

TreeSnapshot ForestView::snapshot(std::size_t tree) const {
  const auto& component = trees_.at(tree);
  return TreeSnapshot::from_edges(component.vertices, component.tree_edges);
}

std::vector<std::string> check_forest(const World& world) {
  const auto& g = world.graph();
  std::vector<std::string> violations;

  for (const auto e : g.present_edges()) {
    const auto [a, b] = g.endpoints(e);
    const auto pa = g.port(e, a);
    const auto pb = g.port(e, b);
    const bool empty = pa == PortLabel::NonTree && pb == PortLabel::NonTree;
    if (!empty && !is_tree_edge(g, e, a, b)) {
      violations.push_back("edge (" + vtx(a) + "," + vtx(b) + ") has illegal port pair {" +
                           std::string(to_string(pa)) + "," + std::string(to_string(pb)) + "}");
    }
  }
  if (const auto stale = g.stale_port_count(); stale != 0) {
    violations.push_back(std::to_string(stale) + " stale port entries left after edge removal");
  }

  const auto view = ForestView::derive(world);
  for (const auto& tree : view.trees()) {
    if (tree.token_vertices.size() != 1) {
      violations.push_back("tree containing vertex " + vtx(tree.vertices.front()) + " has " +
                           std::to_string(tree.token_vertices.size()) + " T vertices");
    }
    if (tree.tree_edges.size() + 1 != tree.vertices.size()) {
      violations.push_back("tree containing vertex " + vtx(tree.vertices.front()) + " has " +
                           std::to_string(tree.tree_edges.size()) + " edges for " +
                           std::to_string(tree.vertices.size()) + " vertices");
    }
  }

  std::size_t t_vertices = 0;
  for (std::uint32_t i = 0; i < g.vertex_count(); ++i) {
    const VertexId v{i};
    std::size_t ones = 0;
    for (const auto& inc : g.incidences(v)) {
      if (g.port(inc.edge, v) == PortLabel::TowardToken) ++ones;
    }
    const bool is_t = g.label(v) == VertexLabel::T;
    if (is_t) ++t_vertices;
    if (is_t && ones != 0) violations.push_back("T vertex " + vtx(v) + " has a port 1");
    if (!is_t && ones != 1) violations.push_back("N vertex " + vtx(v) + " has " + std::to_string(ones) + " ports 1");
    if (is_t != (world.token_at(v) != nullptr)) violations.push_back("label/token mismatch at vertex " + vtx(v));

    // Follow ports 1 toward the root.
    const auto& tree = view.trees()[view.tree_of(v)];
    VertexId cursor = v;
    std::size_t hops = 0;
    bool reached = g.label(cursor) == VertexLabel::T;
    while (!reached && hops < tree.vertices.size()) {
      bool advanced = false;
      for (const auto& inc : g.incidences(cursor)) {
        if (g.port(inc.edge, cursor) == PortLabel::TowardToken) {
          cursor = inc.neighbor;
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
      ++hops;
      reached = g.label(cursor) == VertexLabel::T;
    }
    if (!reached || hops + 1 > tree.vertices.size()) {
      violations.push_back("port-1 path from vertex " + vtx(v) + " does not reach a T vertex");
    }
  }

  if (world.tokens().size() != t_vertices) {
    violations.push_back(std::to_string(world.tokens().size()) + " tokens for " + std::to_string(t_vertices) +
                         " T vertices");
  }
  for (const auto& token : world.tokens()) {
    if (!token.memory) continue;
    const auto e = g.find_edge(token.position, *token.memory);
    if (!e || !is_tree_edge(g, *e, token.position, *token.memory)) {
      violations.push_back("token " + std::to_string(token.id.value) + " remembers a non tree-neighbour");
    }
  }
  return violations;
}

std::size_t count_components(const DynamicGraph& graph) {
  std::vector<bool> seen(graph.vertex_count(), false);
  std::size_t components = 0;
  for (std::uint32_t s = 0; s < graph.vertex_count(); ++s) {
    if (seen[s]) continue;
    ++components;
    std::deque<VertexId> queue{VertexId{s}};
    seen[s] = true;
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      for (const auto& inc : graph.incidences(v)) {
        if (!seen[inc.neighbor.value]) {
          seen[inc.neighbor.value] = true;
          queue.push_back(inc.neighbor);
        }
      }
    }
  }
  return components;
}

}  // namespace spanforest
