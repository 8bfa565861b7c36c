#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "spanforest/protocol.hpp"
#include "spanforest/tree.hpp"

namespace spanforest {

struct TreeComponent {
  std::vector<VertexId> vertices;
  std::vector<VertexPair> tree_edges;
  std::vector<VertexId> token_vertices;  // T-labelled members; exactly one when consistent
};

/// Partition of the vertices into trees, i.e. connected components of the
/// edges labelled {1,2}. Derived from global state, so it is a simulator-side
/// view, never consulted by the rules.
class ForestView {
 public:
  static ForestView derive(const World& world);

  [[nodiscard]] std::span<const TreeComponent> trees() const { return trees_; }
  [[nodiscard]] std::size_t tree_of(VertexId v) const { return tree_of_.at(v.value); }
  [[nodiscard]] TreeSnapshot snapshot(std::size_t tree) const;

 private:
  std::vector<TreeComponent> trees_;
  std::vector<std::size_t> tree_of_;
};

/// Checks every protocol invariant by exhaustive scan and returns one message
/// per violation (empty when the state is consistent):
///  - present edges carry port pairs {0,0} or {1,2};
///  - each tree has exactly one T vertex, which holds the only token;
///  - every N vertex has exactly one port 1 and T vertices have none;
///  - following ports 1 from any vertex reaches the tree's T vertex without
///    revisiting a vertex;
///  - each tree has size-1 tree edges;
///  - token memory, when set, names a tree neighbour of the token;
///  - no stale port entries remain.
std::vector<std::string> check_forest(const World& world);

/// Connected components of the whole graph (all present edges).
std::size_t count_components(const DynamicGraph& graph);

}  // namespace spanforest
