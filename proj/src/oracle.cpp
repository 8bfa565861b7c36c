// Absorbing-chain oracle for the first meeting of two token walks.

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "spanforest/analysis.hpp"

namespace spanforest {

namespace {

// Walk of a single token as a finite chain. A state is a position plus, for
// the non-backtracking policy, the vertex the token came from.
struct WalkChain {
  std::vector<std::size_t> position;  // local vertex index in the tree
  std::vector<std::vector<std::pair<std::size_t, double>>> next;
  std::vector<std::size_t> fresh;  // state with empty memory, per vertex
};

WalkChain build_chain(const TreeSnapshot& tree, WalkPolicy policy) {
  WalkChain chain;
  const auto n = tree.size();
  const auto vertices = tree.vertices();
  chain.fresh.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    chain.fresh[i] = i;
    chain.position.push_back(i);
  }
  if (policy == WalkPolicy::Uniform) {
    chain.next.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto nbrs = tree.neighbors(vertices[i]);
      for (const auto u : nbrs) chain.next[i].emplace_back(tree.index_of(u), 1.0 / static_cast<double>(nbrs.size()));
    }
    return chain;
  }

  // Non-backtracking: states n.. are (v, came_from) for every directed edge.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> arrived;  // (to, from) -> state
  auto directed_state = [&](std::size_t to, std::size_t from) -> std::size_t {
    const auto [it, inserted] = arrived.try_emplace({to, from}, chain.position.size());
    if (inserted) chain.position.push_back(to);
    return it->second;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto u : tree.neighbors(vertices[i])) directed_state(tree.index_of(u), i);
  }
  chain.next.resize(chain.position.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto nbrs = tree.neighbors(vertices[i]);
    for (const auto u : nbrs) {
      chain.next[i].emplace_back(directed_state(tree.index_of(u), i), 1.0 / static_cast<double>(nbrs.size()));
    }
  }
  for (const auto& [edge, state] : arrived) {
    const auto [to, from] = edge;
    const auto nbrs = tree.neighbors(vertices[to]);
    if (nbrs.size() == 1) {
      chain.next[state].emplace_back(arrived.at({from, to}), 1.0);
      continue;
    }
    const double p = 1.0 / static_cast<double>(nbrs.size() - 1);
    for (const auto u : nbrs) {
      const auto ui = tree.index_of(u);
      if (ui != from) chain.next[state].emplace_back(arrived.at({ui, to}), p);
    }
  }
  return chain;
}

struct ProductChain {
  const WalkChain& a;
  const WalkChain& b;
  const std::vector<bool>& adjacent;  // n1 x n2 bridge matrix
  std::size_t n2;
  ActivationDiscipline discipline;

  [[nodiscard]] std::size_t phases() const { return discipline == ActivationDiscipline::Interleaved ? 3 : 1; }
  [[nodiscard]] std::size_t encode(std::size_t s1, std::size_t s2, std::size_t phase) const {
    return (s1 * b.position.size() + s2) * phases() + phase;
  }
  [[nodiscard]] bool absorbing(std::size_t state) const {
    const auto pair = state / phases();
    const auto s1 = pair / b.position.size();
    const auto s2 = pair % b.position.size();
    return adjacent[a.position[s1] * n2 + b.position[s2]];
  }

  // Calls emit(next_state, probability); every transition costs `cost()` moves.
  template <typename Emit>
  void successors(std::size_t state, Emit&& emit) const {
    const auto phase = state % phases();
    const auto pair = state / phases();
    const auto s1 = pair / b.position.size();
    const auto s2 = pair % b.position.size();
    if (discipline == ActivationDiscipline::LockStep) {
      for (const auto& [n1, p1] : a.next[s1]) {
        for (const auto& [m2, p2] : b.next[s2]) emit(encode(n1, m2, 0), p1 * p2);
      }
      return;
    }
    switch (phase) {
      case 0:
        for (const auto& [n1, p] : a.next[s1]) emit(encode(n1, s2, 1), 0.5 * p);
        for (const auto& [m2, p] : b.next[s2]) emit(encode(s1, m2, 2), 0.5 * p);
        break;
      case 1:
        for (const auto& [m2, p] : b.next[s2]) emit(encode(s1, m2, 0), p);
        break;
      default:
        for (const auto& [n1, p] : a.next[s1]) emit(encode(n1, s2, 0), p);
        break;
    }
  }
  [[nodiscard]] double cost() const { return discipline == ActivationDiscipline::LockStep ? 2.0 : 1.0; }
};

double solve(const TreeSnapshot& t1, const TreeSnapshot& t2, std::span<const Bridge> bridges,
             const std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>>& starts,
             ActivationDiscipline discipline, WalkPolicy policy) {
  if (t1.size() < 2 || t2.size() < 2) throw std::invalid_argument("both trees need at least two vertices");
  if (t1.size() * t2.size() > 10'000) throw std::invalid_argument("product state space exceeds 10^4 position pairs");

  const auto n2 = t2.size();
  std::vector<bool> adjacent(t1.size() * n2, false);
  for (const auto& b : bridges) {
    if (!t1.contains(b.u) || !t2.contains(b.v)) throw std::invalid_argument("bridge does not join the two trees");
    adjacent[t1.index_of(b.u) * n2 + t2.index_of(b.v)] = true;
  }

  const auto chain1 = build_chain(t1, policy);
  const auto chain2 = build_chain(t2, policy);
  const ProductChain product{chain1, chain2, adjacent, n2, discipline};

  // Forward exploration of the transient states reachable from the starts.
  constexpr auto none = static_cast<std::size_t>(-1);
  const auto total = chain1.position.size() * chain2.position.size() * product.phases();
  std::vector<std::size_t> compact(total, none);
  std::vector<std::size_t> states;
  std::vector<std::vector<std::size_t>> predecessors;
  std::vector<bool> hits_target;
  std::deque<std::size_t> queue;
  auto visit = [&](std::size_t s) {
    if (compact[s] != none) return;
    compact[s] = states.size();
    states.push_back(s);
    predecessors.emplace_back();
    hits_target.push_back(false);
    queue.push_back(s);
  };
  for (const auto& [pos, weight] : starts) {
    const auto s = product.encode(chain1.fresh[pos.first], chain2.fresh[pos.second], 0);
    if (!product.absorbing(s)) visit(s);
  }
  while (!queue.empty()) {
    const auto s = queue.front();
    queue.pop_front();
    const auto from = compact[s];
    product.successors(s, [&](std::size_t next, double) {
      if (product.absorbing(next)) {
        hits_target[from] = true;
        return;
      }
      visit(next);
      predecessors[compact[next]].push_back(from);
    });
  }

  // Every explored state must be able to reach a meeting, otherwise the
  // expectation is infinite (e.g. lock-step parity deadlock).
  std::vector<bool> can_finish(states.size(), false);
  std::deque<std::size_t> back;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (hits_target[i]) {
      can_finish[i] = true;
      back.push_back(i);
    }
  }
  while (!back.empty()) {
    const auto i = back.front();
    back.pop_front();
    for (const auto p : predecessors[i]) {
      if (!can_finish[p]) {
        can_finish[p] = true;
        back.push_back(p);
      }
    }
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!can_finish[i]) throw OracleError("a reachable configuration can never lead to a meeting");
  }

  double result = 0.0;
  if (!states.empty()) {
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t i = 0; i < states.size(); ++i) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
      product.successors(states[i], [&](std::size_t next, double p) {
        if (!product.absorbing(next)) triplets.emplace_back(static_cast<int>(i), static_cast<int>(compact[next]), -p);
      });
    }
    const auto size = static_cast<Eigen::Index>(states.size());
    Eigen::SparseMatrix<double> system(size, size);
    system.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(system);
    if (lu.info() != Eigen::Success) throw OracleError("absorbing chain system is singular");
    const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(size, product.cost());
    const Eigen::VectorXd expected = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw OracleError("absorbing chain solve failed");

    for (const auto& [pos, weight] : starts) {
      const auto s = product.encode(chain1.fresh[pos.first], chain2.fresh[pos.second], 0);
      if (!product.absorbing(s)) result += weight * expected[static_cast<Eigen::Index>(compact[s])];
    }
  }
  return result;
}

}  // namespace

double exact_first_meeting(const TreeSnapshot& t1, const TreeSnapshot& t2, std::span<const Bridge> bridges,
                           VertexId start1, VertexId start2, ActivationDiscipline discipline, WalkPolicy policy) {
  return solve(t1, t2, bridges, {{{t1.index_of(start1), t2.index_of(start2)}, 1.0}}, discipline, policy);
}

double exact_first_meeting_stationary(const TreeSnapshot& t1, const TreeSnapshot& t2,
                                      std::span<const Bridge> bridges, ActivationDiscipline discipline,
                                      WalkPolicy policy) {
  std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>> starts;
  for (std::size_t i = 0; i < t1.size(); ++i) {
    for (std::size_t j = 0; j < t2.size(); ++j) {
      const double w = to_double(stationary_prob(t1, t1.vertices()[i])) * to_double(stationary_prob(t2, t2.vertices()[j]));
      starts.push_back({{i, j}, w});
    }
  }
  return solve(t1, t2, bridges, starts, discipline, policy);
}

}  // namespace spanforest
