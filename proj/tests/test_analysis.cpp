#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "support/oracles.hpp"
#include "timax/analysis.hpp"

using namespace timax;

namespace {

bool is_subset(const std::vector<std::uint32_t>& small, const std::vector<std::uint32_t>& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

TEST(Overlap, IdenticalEdgeSets) {
  GraphBuilder b(4, 2);
  b.add(0, 1, 0, 0.3).add(0, 1, 1, 0.6).add(2, 3, 0, 0.1).add(2, 3, 1, 0.9);
  const auto r = overlap_coefficients(std::move(b).build(), 0.0);
  EXPECT_EQ(r.edge_overlap(0, 1), 1.0);
  EXPECT_EQ(r.node_overlap(0, 1), 1.0);
}

TEST(Overlap, EdgeArithmetic) {
  // tau_0 = {e1, e2, e3}, tau_1 = {e2, e4}.
  GraphBuilder b(5, 2);
  b.add(0, 1, 0, 0.5).add(1, 2, 0, 0.5).add(1, 2, 1, 0.5).add(2, 3, 0, 0.5).add(3, 4, 1, 0.5);
  const auto r = overlap_coefficients(std::move(b).build(), 0.0);
  EXPECT_EQ(r.edge_overlap(0, 1), 0.5);
  EXPECT_EQ(r.edge_overlap(1, 0), 0.5);
  EXPECT_EQ(r.edge_summary.pairs, 1u);
  EXPECT_EQ(r.edge_summary.mean, 0.5);
}

TEST(Overlap, SeparableGraphHasZeroNodeOverlap) {
  std::mt19937_64 rng(1);
  const auto r = overlap_coefficients(timax::testing::separable_graph(rng, 6, 6, 10, 10), 0.0);
  EXPECT_EQ(r.node_overlap(0, 1), 0.0);
  EXPECT_EQ(r.edge_overlap(0, 1), 0.0);
}

TEST(Overlap, UndefinedWhenAQualifyingSetIsEmpty) {
  GraphBuilder b(3, 3);
  b.add(0, 1, 0, 0.5).add(1, 2, 1, 0.2);
  const auto r = overlap_coefficients(std::move(b).build(), 0.3);
  EXPECT_FALSE(r.edge_overlap(0, 1).has_value());
  EXPECT_FALSE(r.edge_overlap(0, 2).has_value());
  EXPECT_EQ(r.edge_summary.pairs, 0u);
  std::ostringstream csv;
  write_overlap_csv(csv, r, false);
  EXPECT_EQ(csv.str(), "topic_i,topic_j,overlap\n");
}

TEST(Overlap, SymmetricBoundedAndShrinking) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = timax::testing::random_graph(rng, 20, 60, 4);
    for (double theta : {0.0, 0.2, 0.5, 0.9}) {
      const auto r = overlap_coefficients(g, theta);
      for (TopicId i = 0; i < 4; ++i) {
        for (TopicId j = 0; j < 4; ++j) {
          EXPECT_EQ(r.edge_overlap(i, j), r.edge_overlap(j, i));
          EXPECT_EQ(r.node_overlap(i, j), r.node_overlap(j, i));
          if (auto v = r.node_overlap(i, j)) {
            EXPECT_GE(*v, 0.0);
            EXPECT_LE(*v, 1.0);
          }
        }
        EXPECT_TRUE(is_subset(qualifying_edges(g, i, theta + 0.1), qualifying_edges(g, i, theta)));
        EXPECT_TRUE(is_subset(qualifying_nodes(g, i, theta + 0.1), qualifying_nodes(g, i, theta)));
      }
    }
  }
}

TEST(SeedSourceOverlap, FullCoverage) {
  // Topic 0 star on 0 (leaves 2..4), topic 1 star on 1 (leaves 5..7).
  GraphBuilder b(8, 2);
  for (NodeId v = 2; v <= 4; ++v) b.add(0, v, 0, 0.9);
  for (NodeId v = 5; v <= 7; ++v) b.add(1, v, 1, 0.9);
  const auto g = std::move(b).build();
  const std::vector<TopicMixture> mixtures{TopicMixture({0.5, 0.5}), TopicMixture({0.3, 0.7})};
  const auto r = seed_source_overlap(g, mixtures, 2, OracleConfig::exact());
  EXPECT_EQ(r.percentage, 100.0);
  EXPECT_EQ(r.per_mixture, (std::vector<double>{1.0, 1.0}));
}

TEST(SeedSourceOverlap, Disjoint) {
  // Node 2 reaches four leaves through both topics at 0.4; nodes 0 and 1 each
  // reach three leaves through one topic at 0.6. Alone each topic prefers its
  // own hub (2.8 > 2.6), while the even mixture prefers node 2 (2.6 > 1.9).
  GraphBuilder b(13, 2);
  for (NodeId v = 3; v <= 5; ++v) b.add(0, v, 0, 0.6);
  for (NodeId v = 6; v <= 8; ++v) b.add(1, v, 1, 0.6);
  for (NodeId v = 9; v <= 12; ++v) b.add(2, v, 0, 0.4).add(2, v, 1, 0.4);
  const auto g = std::move(b).build();
  const std::vector<TopicMixture> mixtures{TopicMixture({0.5, 0.5})};
  const auto r = seed_source_overlap(g, mixtures, 1, OracleConfig::exact());
  EXPECT_EQ(r.percentage, 0.0);
  EXPECT_THROW(seed_source_overlap(g, std::vector<TopicMixture>{TopicMixture::one_hot(2, 0)}, 1, OracleConfig::exact()),
               InvalidInput);
}

TEST(Smoothing, NothingAboveCutoff) {
  std::mt19937_64 rng(3);
  const auto g = timax::testing::random_graph(rng, 10, 20, 2);
  EXPECT_EQ(smooth_probabilities(g, 0.99, 1), g);
}

TEST(Smoothing, DrawsFromTheTopicsOwnValues) {
  GraphBuilder b(4, 2);
  b.add(0, 1, 0, 0.2).add(1, 2, 0, 0.4).add(2, 3, 0, 0.995).add(0, 3, 1, 0.7);
  const auto g = std::move(b).build();
  std::set<double> seen;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = smooth_probabilities(g, 0.99, seed);
    const EdgeId e = *s.find_edge(2, 3);
    const double q = s.probability(e, 0);
    EXPECT_TRUE(q == 0.2 || q == 0.4);
    seen.insert(q);
    EXPECT_EQ(s.probability(*s.find_edge(0, 1), 0), 0.2);
    EXPECT_EQ(s.probability(*s.find_edge(0, 3), 1), 0.7);
    EXPECT_EQ(s.edge_count(), g.edge_count());
  }
  EXPECT_EQ(seen.size(), 2u);
  EXPECT_EQ(smooth_probabilities(g, 0.99, 7), smooth_probabilities(g, 0.99, 7));
}

TEST(Smoothing, CannotSmoothATopicWithNothingBelow) {
  GraphBuilder b(3, 2);
  b.add(0, 1, 0, 0.5).add(1, 2, 1, 0.999);
  const auto g = std::move(b).build();
  try {
    smooth_probabilities(g, 0.99, 0);
    FAIL();
  } catch (const CannotSmooth& e) {
    EXPECT_EQ(e.topic(), 1u);
  }
}

TEST(Stats, Examples) {
  GraphBuilder b(5, 3);
  b.add(0, 1, 0, 0.1).add(1, 2, 0, 0.2).add(2, 3, 0, 0.3).add(3, 4, 2, 0.5);
  const auto stats = probability_stats(std::move(b).build());
  ASSERT_EQ(stats.size(), 3u);
  EXPECT_EQ(stats[0].nonzero, 3u);
  EXPECT_NEAR(stats[0].summary->mean, 0.2, 1e-15);
  EXPECT_NEAR(stats[0].summary->p50, 0.2, 1e-15);
  EXPECT_NEAR(stats[0].summary->p25, 0.15, 1e-15);
  EXPECT_NEAR(stats[0].summary->p75, 0.25, 1e-15);
  EXPECT_NEAR(stats[0].summary->stddev, std::sqrt(0.02 / 3), 1e-15);
  EXPECT_EQ(stats[1].nonzero, 0u);
  EXPECT_FALSE(stats[1].summary.has_value());
  EXPECT_EQ(stats[2].summary->p25, 0.5);
  EXPECT_EQ(stats[2].summary->p75, 0.5);
  EXPECT_EQ(stats[2].summary->stddev, 0.0);
  std::ostringstream csv;
  write_stats_csv(csv, stats);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "topic,nonzero,mean,stddev,p25,p50,p75");
  EXPECT_NE(csv.str().find("\n1,0,,,,,\n"), std::string::npos);
}

TEST(Bounds, Offline) { EXPECT_NEAR(offline_bound(10.0), 15.8198, 1e-3); }

TEST(Bounds, OnlineOnIsolatedNodes) {
  GraphBuilder b(5, 1);
  const auto g = std::move(b).build();
  const auto r = online_bound(g, topic_probabilities(g, 0), {}, 2, OracleConfig::exact());
  EXPECT_EQ(r.value, 2.0);
  ASSERT_EQ(r.candidates.size(), 1u);
}

TEST(Bounds, UpperBoundTheOptimum) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + trial % 5;
    const auto g = timax::testing::random_graph(rng, n, n + 3);
    const auto p = topic_probabilities(g, 0);
    const auto spread = [&](const std::vector<NodeId>& s) { return timax::testing::brute_force_spread(g, p, s); };
    const double optimum = timax::testing::optimum_by_enumeration(n, 2, spread);
    const auto greedy = greedy_select(g, p, 2, OracleConfig::exact());
    const std::vector<std::vector<NodeId>> candidates{greedy.nodes()};
    const auto online = online_bound(g, p, candidates, 2, OracleConfig::exact());
    EXPECT_GE(online.value + 1e-9, optimum);
    EXPECT_LE(online.value, online.candidates[0]);
    EXPECT_GE(offline_bound(spread(greedy.nodes())) + 1e-9, optimum);
  }
}

TEST(SampleMixtures, UniformPairs) {
  const auto ms = sample_mixtures(MixtureSampling::uniform_pairs(), 200, 5, 9);
  ASSERT_EQ(ms.size(), 200u);
  std::set<std::pair<TopicId, TopicId>> pairs;
  for (const auto& m : ms) {
    const auto support = m.support();
    ASSERT_EQ(support.size(), 2u);
    EXPECT_NEAR(m[support[0]] + m[support[1]], 1.0, 1e-12);
    pairs.insert({support[0], support[1]});
  }
  EXPECT_EQ(pairs.size(), 10u);
  EXPECT_EQ(ms, sample_mixtures(MixtureSampling::uniform_pairs(), 200, 5, 9));
  EXPECT_THROW(sample_mixtures(MixtureSampling::uniform_pairs(), 1, 1, 0), InvalidInput);
}

TEST(SampleMixtures, Dirichlet) {
  const auto ms = sample_mixtures(MixtureSampling::dirichlet({1e6}), 20, 4, 3);
  for (const auto& m : ms) {
    for (TopicId i = 0; i < 4; ++i) EXPECT_NEAR(m[i], 0.25, 0.01);
  }
  const auto sparse = sample_mixtures(MixtureSampling::dirichlet({0.2, 0.5, 1.0}), 100, 3, 4);
  for (const auto& m : sparse) {
    double total = 0.0;
    for (TopicId i = 0; i < 3; ++i) {
      EXPECT_TRUE(m[i] == 0.0 || m[i] >= 0.01);
      total += m[i];
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
  EXPECT_EQ(sparse, sample_mixtures(MixtureSampling::dirichlet({0.2, 0.5, 1.0}), 100, 3, 4));
  EXPECT_THROW(sample_mixtures(MixtureSampling::dirichlet({1.0, -1.0}), 1, 2, 0), InvalidInput);
  EXPECT_THROW(sample_mixtures(MixtureSampling::dirichlet({1.0, 1.0}), 1, 3, 0), InvalidInput);
}
