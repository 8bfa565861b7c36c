#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/rational.hpp>

#include "spanforest/forest.hpp"
#include "spanforest/graph.hpp"
#include "spanforest/protocol.hpp"
#include "spanforest/tree.hpp"

namespace spanforest {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

/// Cross edge (u in the first tree, v in the second) with empty ports.
struct Bridge {
  VertexId u;
  VertexId v;
  friend bool operator==(const Bridge&, const Bridge&) = default;
};

using BridgeSet = std::vector<Bridge>;

/// Long-run probability that the token of `tree` sits on `v`:
/// d(v) / (2 (n - 1)). Throws std::invalid_argument for singleton trees.
Rational stationary_prob(const TreeSnapshot& tree, VertexId v);

/// Probability that two independent stationary tokens sit at the two ends of
/// some bridge. All terms share the denominator 4 |E1| |E2|, so the result is
/// exact for any tree size that fits in 64 bits.
Rational fusion_probability_exact(const TreeSnapshot& t1, const TreeSnapshot& t2, std::span<const Bridge> bridges);
double fusion_probability(const TreeSnapshot& t1, const TreeSnapshot& t2, std::span<const Bridge> bridges);

/// Reciprocal of the fusion probability; empty when no bridge exists.
std::optional<Rational> expected_fusion_time_exact(const TreeSnapshot& t1, const TreeSnapshot& t2,
                                                   std::span<const Bridge> bridges);
std::optional<double> expected_fusion_time(const TreeSnapshot& t1, const TreeSnapshot& t2,
                                           std::span<const Bridge> bridges);

/// All empty-port edges between two distinct trees of the forest, oriented
/// from `tree_a` to `tree_b`, in edge insertion order.
BridgeSet enumerate_bridges(const DynamicGraph& graph, const ForestView& forest, std::size_t tree_a,
                            std::size_t tree_b);

enum class ActivationDiscipline : std::uint8_t {
  // Each round activates both tokens once in a uniformly random order; the
  // meeting test runs at every activation. Matches scheduler_step.
  Interleaved,
  // Both tokens move at once and the test runs once per round.
  LockStep,
};

class OracleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Expected number of token moves before the first meeting (the activation
/// at which a token finds the other one across a bridge), from the product
/// Markov chain of the two walks. Solved exactly with a sparse LU
/// factorisation. Throws OracleError when a reachable state cannot reach a
/// meeting, and std::invalid_argument when |V1|*|V2| exceeds 10^4.
double exact_first_meeting(const TreeSnapshot& t1, const TreeSnapshot& t2, std::span<const Bridge> bridges,
                           VertexId start1, VertexId start2,
                           ActivationDiscipline discipline = ActivationDiscipline::Interleaved,
                           WalkPolicy policy = WalkPolicy::Uniform);

/// Same expectation with both start positions drawn from the stationary law.
double exact_first_meeting_stationary(const TreeSnapshot& t1, const TreeSnapshot& t2,
                                      std::span<const Bridge> bridges,
                                      ActivationDiscipline discipline = ActivationDiscipline::Interleaved,
                                      WalkPolicy policy = WalkPolicy::Uniform);

}  // namespace spanforest
