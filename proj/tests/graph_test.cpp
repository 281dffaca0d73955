#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "detour/generators.hpp"
#include "detour/graph.hpp"
#include "oracles.hpp"

using namespace detour;

TEST(Topology, RejectsSelfLoopsParallelLinksAndBadWeights) {
  Topology t(3);
  t.add_link(0, 1, 1.0);
  EXPECT_THROW(t.add_link(1, 1, 1.0), TopologyError);
  EXPECT_THROW(t.add_link(1, 0, 2.0), TopologyError);
  EXPECT_THROW(t.add_link(0, 2, -0.5), TopologyError);
  EXPECT_THROW(t.add_link(0, 3, 1.0), TopologyError);
  EXPECT_THROW(t.add_link(0, 2, std::nan("")), TopologyError);
  EXPECT_EQ(t.link_count(), 1);
}

TEST(Topology, AdjacencyMatchesDeclaredLinks) {
  const auto t = oracle::from_edges(4, {{2, 0, 1.0}, {0, 1, 2.0}, {3, 0, 3.0}});
  ASSERT_EQ(t.degree(0), 3u);
  EXPECT_EQ(t.arcs(0)[0].to, 1);
  EXPECT_EQ(t.arcs(0)[1].to, 2);
  EXPECT_EQ(t.arcs(0)[2].to, 3);
  EXPECT_EQ(t.link(t.link_between(0, 3)).weight, 3.0);
  EXPECT_FALSE(t.find_link(1, 2).has_value());
  EXPECT_EQ(t.link(t.link_between(2, 0)).u, 0);
}

TEST(Topology, ScenarioLiveness) {
  const auto t = oracle::ring(4);
  const LinkId l12 = t.link_between(1, 2);
  const auto link = FailureScenario::link_down(l12);
  EXPECT_FALSE(link.link_alive(t, l12));
  EXPECT_TRUE(link.link_alive(t, t.link_between(0, 1)));
  const auto node = FailureScenario::node_down(1);
  EXPECT_FALSE(node.node_alive(1));
  EXPECT_FALSE(node.link_alive(t, l12));
  EXPECT_FALSE(node.link_alive(t, t.link_between(0, 1)));
  EXPECT_TRUE(node.link_alive(t, t.link_between(2, 3)));
  EXPECT_EQ(parse_scenario(t, "link:2-1"), link);
  EXPECT_EQ(parse_scenario(t, "node:1"), node);
  EXPECT_EQ(parse_scenario(t, "none"), FailureScenario::none());
  EXPECT_THROW(parse_scenario(t, "link:0-2"), std::exception);
  EXPECT_THROW(parse_scenario(t, "node:9"), std::exception);
}

TEST(TwoConnected, SmallCases) {
  EXPECT_TRUE(is_two_connected(oracle::complete(3)));
  EXPECT_FALSE(is_two_connected(oracle::from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}})));
  EXPECT_TRUE(is_two_connected(generate_lattice(9, 0)));
  EXPECT_FALSE(is_two_connected(Topology(2)));
  // Two triangles sharing node 2.
  EXPECT_FALSE(is_two_connected(
      oracle::from_edges(5, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}, {2, 4, 1.0}})));
}

TEST(TwoConnected, AgreesWithNodeRemovalOracle) {
  std::mt19937_64 rng(7);
  int positives = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 8);
    const double p = 0.25 + 0.5 * static_cast<double>(rng() % 100) / 100.0;
    Topology t(n);
    std::bernoulli_distribution coin(p);
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        if (coin(rng)) t.add_link(u, v, 1.0);
      }
    }
    const bool expected = oracle::two_connected(t);
    positives += expected;
    EXPECT_EQ(is_two_connected(t), expected) << "trial " << trial;
  }
  EXPECT_GT(positives, 50);
  EXPECT_LT(positives, 350);
}

TEST(ErdosRenyi, ThreeNodesGiveTriangle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto t = generate_erdos_renyi(3, seed);
    EXPECT_EQ(t.link_count(), 3);
  }
}

TEST(ErdosRenyi, DeterministicAndTwoConnected) {
  const auto a = generate_erdos_renyi(25, 42);
  const auto b = generate_erdos_renyi(25, 42);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, generate_erdos_renyi(25, 43));
  EXPECT_TRUE(is_two_connected(a));
  for (const auto& l : a.links()) {
    EXPECT_GT(l.weight, 0.0);
    EXPECT_LT(l.weight, 1.0);
    EXPECT_EQ(l.weight, quantize_weight(l.weight));
  }
}

TEST(ErdosRenyi, MeanLinkCountMatchesExpectation) {
  const double expected = 25.0 * 24.0 / 2.0 * 2.0 * std::log(25.0) / 25.0;
  EXPECT_NEAR(expected, 77.25, 0.01);
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) total += generate_erdos_renyi(25, seed).link_count();
  EXPECT_NEAR(total / 1000.0, expected, 0.10 * expected);
}

TEST(ErdosRenyi, RetryBudgetExhaustion) {
  EXPECT_THROW(generate_erdos_renyi(25, 1, 0), GenerationError);
  EXPECT_THROW(generate_waxman(25, 1, 0), GenerationError);
}

TEST(Lattice, Structure) {
  const auto nine = generate_lattice(9, 5);
  EXPECT_EQ(nine.link_count(), 12);
  EXPECT_EQ(nine.degree(4), 4u);
  EXPECT_TRUE(is_two_connected(nine));

  const auto sixteen = generate_lattice(16, 5);
  EXPECT_EQ(sixteen.link_count(), 2 * 4 * 3);
  for (NodeId corner : {0, 3, 12, 15}) EXPECT_EQ(sixteen.degree(corner), 2u);
  for (NodeId inner : {5, 6, 9, 10}) EXPECT_EQ(sixteen.degree(inner), 4u);
  // Boundary cycle: consecutive exterior nodes are linked.
  for (auto [u, v] : {std::pair{0, 1}, {1, 2}, {2, 3}, {3, 7}, {7, 11}, {11, 15}, {12, 13}, {0, 4}, {4, 8}, {8, 12}}) {
    EXPECT_TRUE(sixteen.find_link(u, v).has_value()) << u << "-" << v;
  }
  EXPECT_FALSE(sixteen.find_link(0, 5).has_value());
  EXPECT_EQ(generate_lattice(16, 5), sixteen);
}

TEST(Lattice, RejectsNonSquares) {
  EXPECT_THROW(generate_lattice(10, 1), std::invalid_argument);
  EXPECT_THROW(generate_lattice(4, 1), std::invalid_argument);
}

TEST(Waxman, ThreeNodesGiveEuclideanTriangle) {
  const auto t = generate_waxman(3, 11);
  ASSERT_EQ(t.link_count(), 3);
  const double a = t.link(0).weight, b = t.link(1).weight, c = t.link(2).weight;
  EXPECT_LE(a, b + c);
  EXPECT_LE(b, a + c);
  EXPECT_LE(c, a + b);
  for (const auto& l : t.links()) EXPECT_LE(l.weight, std::sqrt(2.0));
}

TEST(Waxman, SampleWeightsAreDistances) {
  Rng rng(3);
  const auto s = sample_waxman(12, rng);
  double max_d = 0.0;
  for (int i = 0; i < 12; ++i) {
    for (int j = i + 1; j < 12; ++j) max_d = std::max(max_d, std::hypot(s.x[i] - s.x[j], s.y[i] - s.y[j]));
  }
  EXPECT_EQ(s.max_distance, max_d);
  for (const auto& l : s.topology.links()) {
    EXPECT_EQ(l.weight, quantize_weight(std::hypot(s.x[l.u] - s.x[l.v], s.y[l.u] - s.y[l.v])));
  }
}

TEST(Waxman, DeterministicAndTwoConnected) {
  const auto a = generate_waxman(25, 9);
  EXPECT_EQ(a, generate_waxman(25, 9));
  EXPECT_TRUE(is_two_connected(a));
}

TEST(Waxman, AcceptanceProbabilityAtMaximumDistance) {
  EXPECT_DOUBLE_EQ(waxman_link_probability(1.0, 1.0), 0.5 * std::exp(-2.0));
  EXPECT_DOUBLE_EQ(waxman_link_probability(0.0, 1.0), 0.5);
  EXPECT_GT(waxman_link_probability(0.2, 1.0), waxman_link_probability(0.4, 1.0));
}

// Pairs near the maximum distance are accepted at 0.5 e^-2 within 10%,
// measured against the model probability summed over the bucket.
TEST(Waxman, EmpiricalAcceptanceNearMaximumDistance) {
  double expected = 0.0;
  double accepted = 0.0;
  double pairs = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    const auto s = sample_waxman(25, rng);
    for (NodeId a = 0; a < 25; ++a) {
      for (NodeId b = a + 1; b < 25; ++b) {
        const double d = std::hypot(s.x[a] - s.x[b], s.y[a] - s.y[b]);
        if (d < 0.8 * s.max_distance) continue;
        pairs += 1.0;
        expected += 0.5 * std::exp(-2.0 * d / s.max_distance);
        accepted += s.topology.find_link(a, b).has_value() ? 1.0 : 0.0;
      }
    }
  }
  ASSERT_GT(pairs, 5000.0);
  EXPECT_NEAR(accepted / expected, 1.0, 0.10);
  // The bucket mean probability brackets the value at distance a.
  EXPECT_GE(expected / pairs, 0.5 * std::exp(-2.0));
  EXPECT_LE(expected / pairs, 0.5 * std::exp(-1.6));
}

TEST(Generate, ParsesKinds) {
  EXPECT_EQ(parse_network_kind("er"), NetworkKind::kErdosRenyi);
  EXPECT_EQ(parse_network_kind("waxman"), NetworkKind::kWaxman);
  EXPECT_EQ(parse_network_kind(to_string(NetworkKind::kLattice)), NetworkKind::kLattice);
  EXPECT_THROW(parse_network_kind("mesh"), std::invalid_argument);
  EXPECT_EQ(generate(NetworkKind::kLattice, 9, 4), generate_lattice(9, 4));
}
