#include "spanforest/tree.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace spanforest {

TreeSnapshot TreeSnapshot::from_edges(std::vector<VertexId> vertices, std::vector<VertexPair> edges) {
  if (vertices.empty()) throw std::invalid_argument("tree must contain at least one vertex");
  if (edges.size() != vertices.size() - 1) {
    throw std::invalid_argument("tree on " + std::to_string(vertices.size()) + " vertices needs " +
                                std::to_string(vertices.size() - 1) + " edges, got " + std::to_string(edges.size()));
  }
  TreeSnapshot tree;
  tree.vertices_ = std::move(vertices);
  tree.adjacency_.resize(tree.vertices_.size());
  for (std::size_t i = 0; i < tree.vertices_.size(); ++i) {
    if (!tree.index_.emplace(tree.vertices_[i], i).second) {
      throw std::invalid_argument("duplicate vertex " + std::to_string(tree.vertices_[i].value));
    }
  }

  // Union-find rejects cycles; n-1 acyclic edges then imply connectivity.
  std::vector<std::size_t> parent(tree.vertices_.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : edges) {
    const auto ia = tree.index_of(a);
    const auto ib = tree.index_of(b);
    if (ia == ib) throw std::invalid_argument("self-loop in tree");
    const auto ra = find(ia);
    const auto rb = find(ib);
    if (ra == rb) throw std::invalid_argument("edge set contains a cycle");
    parent[ra] = rb;
    tree.adjacency_[ia].push_back(b);
    tree.adjacency_[ib].push_back(a);
  }
  tree.edges_ = std::move(edges);
  return tree;
}

std::size_t TreeSnapshot::index_of(VertexId v) const {
  const auto it = index_.find(v);
  if (it == index_.end()) throw std::out_of_range("vertex " + std::to_string(v.value) + " is not in the tree");
  return it->second;
}

TreeSnapshot TreeSnapshot::shifted(std::uint32_t offset) const {
  std::vector<VertexId> vertices;
  vertices.reserve(vertices_.size());
  for (auto v : vertices_) vertices.push_back(VertexId{v.value + offset});
  std::vector<VertexPair> edges;
  edges.reserve(edges_.size());
  for (const auto& [a, b] : edges_) edges.emplace_back(VertexId{a.value + offset}, VertexId{b.value + offset});
  return from_edges(std::move(vertices), std::move(edges));
}

TreeSnapshot path_tree(std::size_t n, std::uint32_t first) {
  std::vector<VertexId> vertices;
  std::vector<VertexPair> edges;
  for (std::uint32_t i = 0; i < n; ++i) {
    vertices.push_back(VertexId{first + i});
    if (i > 0) edges.emplace_back(VertexId{first + i - 1}, VertexId{first + i});
  }
  return TreeSnapshot::from_edges(std::move(vertices), std::move(edges));
}

TreeSnapshot star_tree(std::size_t n, std::uint32_t first) {
  std::vector<VertexId> vertices;
  std::vector<VertexPair> edges;
  for (std::uint32_t i = 0; i < n; ++i) {
    vertices.push_back(VertexId{first + i});
    if (i > 0) edges.emplace_back(VertexId{first}, VertexId{first + i});
  }
  return TreeSnapshot::from_edges(std::move(vertices), std::move(edges));
}

}  // namespace spanforest
