#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "spanforest/graph.hpp"

namespace spanforest {

using VertexPair = std::pair<VertexId, VertexId>;

/// Immutable tree over graph vertex handles. Construction validates that the
/// edges form a single spanning tree of the given vertex set.
class TreeSnapshot {
 public:
  TreeSnapshot() = default;

  static TreeSnapshot from_edges(std::vector<VertexId> vertices, std::vector<VertexPair> edges);

  [[nodiscard]] std::size_t size() const { return vertices_.size(); }
  [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
  [[nodiscard]] std::span<const VertexId> vertices() const { return vertices_; }
  [[nodiscard]] std::span<const VertexPair> edges() const { return edges_; }

  [[nodiscard]] bool contains(VertexId v) const { return index_.contains(v); }
  /// Position of `v` in vertices(); throws std::out_of_range if absent.
  [[nodiscard]] std::size_t index_of(VertexId v) const;
  [[nodiscard]] std::size_t degree(VertexId v) const { return adjacency_[index_of(v)].size(); }
  [[nodiscard]] std::span<const VertexId> neighbors(VertexId v) const { return adjacency_[index_of(v)]; }

  /// Same tree with every vertex handle shifted by `offset`.
  [[nodiscard]] TreeSnapshot shifted(std::uint32_t offset) const;

 private:
  std::vector<VertexId> vertices_;
  std::vector<VertexPair> edges_;
  std::vector<std::vector<VertexId>> adjacency_;
  std::unordered_map<VertexId, std::size_t> index_;
};

TreeSnapshot path_tree(std::size_t n, std::uint32_t first = 0);
TreeSnapshot star_tree(std::size_t n, std::uint32_t first = 0);

}  // namespace spanforest
