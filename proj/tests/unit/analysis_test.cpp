#include <gtest/gtest.h>

#include "oracles.hpp"
#include "spanforest/analysis.hpp"
#include "spanforest/experiments.hpp"
#include "spanforest/forest.hpp"

using namespace spanforest;

namespace {

VertexId V(std::uint32_t i) { return VertexId{i}; }

// Mean first-meeting moves over `runs` Monte-Carlo runs on a fixed instance.
double mc_first_meeting(const Instance& instance, WalkPolicy policy, std::size_t runs, std::uint64_t seed) {
  MeetingOptions options;
  options.measure_recurrence = false;
  options.check_invariants = false;
  double total = 0.0;
  for (std::size_t r = 0; r < runs; ++r) {
    total += static_cast<double>(simulate_meeting(instance, policy, options, derive_seed(seed, r)).first_meeting_moves);
  }
  return total / static_cast<double>(runs);
}

Instance two_edge_instance(VertexId start1, VertexId start2) {
  Instance inst;
  inst.tree1 = path_tree(2, 0);
  inst.tree2 = path_tree(2, 2);
  inst.bridges = {{V(0), V(2)}};
  inst.start1 = start1;
  inst.start2 = start2;
  return inst;
}

}  // namespace

TEST(Stationary, Examples) {
  EXPECT_EQ(stationary_prob(path_tree(3), V(1)), Rational(1, 2));
  EXPECT_EQ(stationary_prob(star_tree(6), V(0)), Rational(1, 2));
  Rng rng(4);
  const auto tree = random_tree(50, rng);
  for (const auto v : tree.vertices()) {
    if (tree.degree(v) == 1) EXPECT_EQ(stationary_prob(tree, v), Rational(1, 98));
  }
  EXPECT_NEAR(to_double(Rational(1, 98)), 0.0102, 1e-4);
  EXPECT_THROW(stationary_prob(path_tree(1), V(0)), std::invalid_argument);
}

TEST(Stationary, NormalizesExactly) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto tree = random_tree(2 + seed % 60, rng);
    Rational total(0);
    for (const auto v : tree.vertices()) total += stationary_prob(tree, v);
    EXPECT_EQ(total, Rational(1));
  }
}

TEST(Fusion, TwoVertexTrees) {
  const auto t1 = path_tree(2, 0);
  const auto t2 = path_tree(2, 2);
  const BridgeSet one{{V(0), V(2)}};
  const BridgeSet two{{V(0), V(2)}, {V(1), V(3)}};
  EXPECT_EQ(fusion_probability_exact(t1, t2, one), Rational(1, 4));
  EXPECT_DOUBLE_EQ(fusion_probability(t1, t2, one), 0.25);
  EXPECT_EQ(fusion_probability_exact(t1, t2, two), Rational(1, 2));
  EXPECT_EQ(*expected_fusion_time_exact(t1, t2, one), Rational(4));
  EXPECT_DOUBLE_EQ(*expected_fusion_time(t1, t2, two), 2.0);
  EXPECT_FALSE(expected_fusion_time(t1, t2, BridgeSet{}));
}

TEST(Fusion, RejectsBadBridges) {
  const auto t1 = path_tree(2, 0);
  const auto t2 = path_tree(2, 2);
  EXPECT_THROW(fusion_probability(t1, t2, BridgeSet{{V(2), V(0)}}), std::invalid_argument);
  EXPECT_THROW(fusion_probability(t1, t2, BridgeSet{{V(0), V(1)}}), std::invalid_argument);
  EXPECT_THROW(fusion_probability(t1, t2, BridgeSet{{V(0), V(2)}, {V(0), V(2)}}), std::invalid_argument);
  EXPECT_THROW(fusion_probability(path_tree(1, 0), t2, BridgeSet{{V(0), V(2)}}), std::invalid_argument);
}

// All pairs of unlabelled trees up to 5 vertices with every bridge set of
// size 1..2 (the acceptance suite goes to 6 vertices and 3 bridges).
TEST(Fusion, MatchesPairEnumeration) {
  std::size_t checked = 0;
  for (std::uint32_t n1 = 2; n1 <= 5; ++n1) {
    for (std::uint32_t n2 = 2; n2 <= 5; ++n2) {
      for (const auto& t1 : oracle::unlabeled_trees(n1, 0)) {
        for (const auto& t2 : oracle::unlabeled_trees(n2, n1)) {
          BridgeSet all;
          for (const auto u : t1.vertices()) {
            for (const auto v : t2.vertices()) all.push_back({u, v});
          }
          for (std::size_t i = 0; i < all.size(); ++i) {
            const BridgeSet one{all[i]};
            EXPECT_EQ(fusion_probability_exact(t1, t2, one), oracle::stationary_pair_sum(t1, t2, one));
            for (std::size_t j = i + 1; j < all.size(); ++j) {
              const BridgeSet two{all[i], all[j]};
              EXPECT_EQ(fusion_probability_exact(t1, t2, two), oracle::stationary_pair_sum(t1, t2, two));
              ++checked;
            }
          }
        }
      }
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(Fusion, UnlabeledTreeCounts) {
  const std::size_t expected[] = {0, 0, 1, 1, 2, 3, 6, 11};
  for (std::uint32_t n = 2; n <= 7; ++n) EXPECT_EQ(oracle::unlabeled_trees(n).size(), expected[n]) << n;
}

TEST(Fusion, BoundedMonotoneAndReciprocal) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const auto t1 = random_tree(8, rng, 0);
    const auto t2 = random_tree(9, rng, 8);
    const auto bridges = wire_bridges(t1, t2, 72, rng);
    Rational previous(0);
    for (std::size_t k = 1; k <= bridges.size(); ++k) {
      const std::span<const Bridge> prefix(bridges.data(), k);
      const auto p = fusion_probability_exact(t1, t2, prefix);
      EXPECT_GT(p, Rational(0));
      EXPECT_LE(p, Rational(1));
      EXPECT_GE(p, previous);
      previous = p;
      EXPECT_EQ(p * *expected_fusion_time_exact(t1, t2, prefix), Rational(1));
      EXPECT_NEAR(fusion_probability(t1, t2, prefix) * *expected_fusion_time(t1, t2, prefix), 1.0, 1e-12);
    }
    // Complete bipartite wiring: every position pair is adjacent.
    EXPECT_EQ(previous, Rational(1));
  }
}

TEST(Bridges, Enumerate) {
  const auto instance = generate_instance(10, 12, 5, 99);
  const World world = instance.build_world();
  const auto forest = ForestView::derive(world);
  ASSERT_EQ(forest.trees().size(), 2u);
  const auto a = forest.tree_of(instance.start1);
  const auto b = forest.tree_of(instance.start2);
  auto found = enumerate_bridges(world.graph(), forest, a, b);
  auto wired = instance.bridges;
  auto key = [](const Bridge& x, const Bridge& y) { return std::pair(x.u, x.v) < std::pair(y.u, y.v); };
  std::sort(found.begin(), found.end(), key);
  std::sort(wired.begin(), wired.end(), key);
  EXPECT_EQ(found, wired);
  EXPECT_THROW(enumerate_bridges(world.graph(), forest, a, a), std::invalid_argument);
}

TEST(Bridges, NoCrossEdgesAndCompleteBipartite) {
  Instance lonely;
  lonely.tree1 = path_tree(2, 0);
  lonely.tree2 = path_tree(2, 2);
  lonely.start1 = V(0);
  lonely.start2 = V(2);
  {
    const World w = lonely.build_world();
    const auto forest = ForestView::derive(w);
    EXPECT_TRUE(enumerate_bridges(w.graph(), forest, 0, 1).empty());
  }
  lonely.bridges = {{V(0), V(2)}, {V(0), V(3)}, {V(1), V(2)}, {V(1), V(3)}};
  const World w = lonely.build_world();
  const auto forest = ForestView::derive(w);
  EXPECT_EQ(enumerate_bridges(w.graph(), forest, 0, 1).size(), 4u);
}

TEST(Oracle, AbsorbingStartIsZero) {
  const auto inst = two_edge_instance(V(0), V(2));
  EXPECT_EQ(exact_first_meeting(inst.tree1, inst.tree2, inst.bridges, V(0), V(2)), 0.0);
}

// Hand-solved: from (1,3) the next two moves always land on (0,2); from
// (0,3), x = 1 + (1 + x)/2 gives x = 3.
TEST(Oracle, TwoVertexTreesByHand) {
  const auto inst = two_edge_instance(V(1), V(3));
  EXPECT_NEAR(exact_first_meeting(inst.tree1, inst.tree2, inst.bridges, V(1), V(3)), 2.0, 1e-12);
  EXPECT_NEAR(exact_first_meeting(inst.tree1, inst.tree2, inst.bridges, V(0), V(3)), 3.0, 1e-12);
  EXPECT_NEAR(exact_first_meeting_stationary(inst.tree1, inst.tree2, inst.bridges), 2.0, 1e-12);
}

TEST(Oracle, TwoVertexTreesAgreeWithMonteCarlo) {
  const auto inst = two_edge_instance(V(0), V(3));
  const double exact = exact_first_meeting(inst.tree1, inst.tree2, inst.bridges, V(0), V(3));
  const double mc = mc_first_meeting(inst, WalkPolicy::Uniform, 1'000'000, 17);
  EXPECT_NEAR(mc / exact, 1.0, 0.01);
}

TEST(Oracle, SmallInstancesAgreeWithMonteCarlo) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto inst = generate_instance(5, 6, 2, seed);
    for (const auto policy : {WalkPolicy::Uniform, WalkPolicy::NonBacktracking}) {
      const double exact = exact_first_meeting(inst.tree1, inst.tree2, inst.bridges, inst.start1, inst.start2,
                                               ActivationDiscipline::Interleaved, policy);
      const double mc = mc_first_meeting(inst, policy, 100'000, seed + 50);
      EXPECT_NEAR(mc / exact, 1.0, 0.02) << "seed " << seed << " " << to_string(policy);
    }
  }
}

TEST(Oracle, StationaryStartExceedsFusionTime) {
  // A path against a star, bridged at the far end of the path.
  const auto t1 = path_tree(6, 0);
  const auto t2 = star_tree(5, 6);
  const BridgeSet bridges{{V(5), V(7)}};
  const double first = exact_first_meeting_stationary(t1, t2, bridges);
  const double eq3 = *expected_fusion_time(t1, t2, bridges);
  EXPECT_GT(first, eq3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = generate_instance(7, 9, 1 + seed % 3, seed);
    EXPECT_GT(exact_first_meeting_stationary(inst.tree1, inst.tree2, inst.bridges),
              *expected_fusion_time(inst.tree1, inst.tree2, inst.bridges));
  }
}

TEST(Oracle, LockStepParityDeadlock) {
  const auto inst = two_edge_instance(V(0), V(3));
  EXPECT_THROW(exact_first_meeting(inst.tree1, inst.tree2, inst.bridges, V(0), V(3), ActivationDiscipline::LockStep),
               OracleError);
  EXPECT_NEAR(exact_first_meeting(inst.tree1, inst.tree2, inst.bridges, V(1), V(3), ActivationDiscipline::LockStep),
              2.0, 1e-12);
}

TEST(Oracle, RejectsOversizedOrDegenerateInput) {
  Rng rng(1);
  const auto big1 = random_tree(101, rng, 0);
  const auto big2 = random_tree(101, rng, 101);
  const BridgeSet b{{V(0), V(101)}};
  EXPECT_THROW(exact_first_meeting(big1, big2, b, V(1), V(102)), std::invalid_argument);
  const auto inst = two_edge_instance(V(0), V(3));
  EXPECT_THROW(exact_first_meeting(inst.tree1, inst.tree2, BridgeSet{}, V(0), V(3)), OracleError);
}
