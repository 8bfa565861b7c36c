#include "spanforest/analysis.hpp"

#include <algorithm>
#include <string>

namespace spanforest {

namespace {

void require_nontrivial(const TreeSnapshot& tree) {
  if (tree.size() < 2) throw std::invalid_argument("stationary law is undefined on a singleton tree");
}

}  // namespace

Rational stationary_prob(const TreeSnapshot& tree, VertexId v) {
  require_nontrivial(tree);
  return Rational(static_cast<std::int64_t>(tree.degree(v)), 2 * static_cast<std::int64_t>(tree.edge_count()));
}

Rational fusion_probability_exact(const TreeSnapshot& t1, const TreeSnapshot& t2, std::span<const Bridge> bridges) {
  require_nontrivial(t1);
  require_nontrivial(t2);
  std::int64_t numerator = 0;
  for (std::size_t i = 0; i < bridges.size(); ++i) {
    const auto& b = bridges[i];
    if (!t1.contains(b.u) || !t2.contains(b.v)) {
      throw std::invalid_argument("bridge (" + std::to_string(b.u.value) + "," + std::to_string(b.v.value) +
                                  ") does not join the first tree to the second");
    }
    if (std::find(bridges.begin(), bridges.begin() + static_cast<std::ptrdiff_t>(i), b) !=
        bridges.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw std::invalid_argument("duplicate bridge");
    }
    numerator += static_cast<std::int64_t>(t1.degree(b.u) * t2.degree(b.v));
  }
  const auto denominator = 4 * static_cast<std::int64_t>(t1.edge_count()) * static_cast<std::int64_t>(t2.edge_count());
  return Rational(numerator, denominator);
}

double fusion_probability(const TreeSnapshot& t1, const TreeSnapshot& t2, std::span<const Bridge> bridges) {
  return to_double(fusion_probability_exact(t1, t2, bridges));
}

std::optional<Rational> expected_fusion_time_exact(const TreeSnapshot& t1, const TreeSnapshot& t2,
                                                   std::span<const Bridge> bridges) {
  const auto p = fusion_probability_exact(t1, t2, bridges);
  if (p.numerator() == 0) return std::nullopt;
  return Rational(1) / p;
}

std::optional<double> expected_fusion_time(const TreeSnapshot& t1, const TreeSnapshot& t2,
                                           std::span<const Bridge> bridges) {
  const auto e = expected_fusion_time_exact(t1, t2, bridges);
  if (!e) return std::nullopt;
  return to_double(*e);
}

BridgeSet enumerate_bridges(const DynamicGraph& graph, const ForestView& forest, std::size_t tree_a,
                            std::size_t tree_b) {
  if (tree_a == tree_b) throw std::invalid_argument("bridges need two distinct trees");
  if (tree_a >= forest.trees().size() || tree_b >= forest.trees().size()) throw std::out_of_range("unknown tree");
  BridgeSet out;
  for (const auto e : graph.present_edges()) {
    const auto [x, y] = graph.endpoints(e);
    if (graph.port(e, x) != PortLabel::NonTree || graph.port(e, y) != PortLabel::NonTree) continue;
    const auto tx = forest.tree_of(x);
    const auto ty = forest.tree_of(y);
    if (tx == tree_a && ty == tree_b) {
      out.push_back({x, y});
    } else if (tx == tree_b && ty == tree_a) {
      out.push_back({y, x});
    }
  }
  return out;
}

}  // namespace spanforest
