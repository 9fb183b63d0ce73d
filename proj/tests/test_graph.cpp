#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "timax/graph.hpp"
#include "timax/graph_io.hpp"

using namespace timax;

namespace {

TopicGraph two_topic_edge(double p1, double p2) {
  GraphBuilder b(2, 2);
  b.add(0, 1, 0, p1).add(0, 1, 1, p2);
  return std::move(b).build();
}

}  // namespace

TEST(MixProbabilities, IdentityMixture) {
  const auto g = two_topic_edge(0.7, 0.2);
  EXPECT_DOUBLE_EQ(mix_probabilities(g, TopicMixture({1.0, 0.0}))[0], 0.7);
}

TEST(MixProbabilities, LinearCombination) {
  const auto g = two_topic_edge(0.2, 0.4);
  EXPECT_NEAR(mix_probabilities(g, TopicMixture({0.5, 0.5}))[0], 0.3, 1e-15);
}

TEST(MixProbabilities, ZeroProbabilities) {
  const auto g = two_topic_edge(0.0, 0.0);
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_TRUE(g.topics(0).empty());
  EXPECT_EQ(mix_probabilities(g, TopicMixture({0.3, 0.7}))[0], 0.0);
}

TEST(MixProbabilities, DimensionMismatchRejected) {
  const auto g = two_topic_edge(0.2, 0.4);
  EXPECT_THROW(mix_probabilities(g, TopicMixture({0.2, 0.3, 0.5})), InvalidInput);
}

TEST(MixProbabilities, ConvexAndOneHotProperties) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 1 + trial % 5;
    GraphBuilder b(6, d);
    for (NodeId s = 0; s < 5; ++s) {
      for (TopicId t = 0; t < d; ++t) {
        if (u(rng) < 0.7) b.add(s, s + 1, t, u(rng));
      }
    }
    const auto g = std::move(b).build();
    std::vector<double> raw(d);
    for (auto& x : raw) x = u(rng);
    const auto mixture = normalize_mixture(raw, 0.0);
    const auto p = mix_probabilities(g, mixture);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      double lo = 1.0, hi = 0.0;
      for (TopicId t = 0; t < d; ++t) {
        lo = std::min(lo, g.probability(e, t));
        hi = std::max(hi, g.probability(e, t));
      }
      EXPECT_GE(p[e], lo - 1e-15);
      EXPECT_LE(p[e], hi + 1e-15);
    }
    for (TopicId t = 0; t < d; ++t) {
      const auto one_hot = mix_probabilities(g, TopicMixture::one_hot(d, t));
      for (EdgeId e = 0; e < g.edge_count(); ++e) EXPECT_EQ(one_hot[e], g.probability(e, t));
    }
  }
}

TEST(ScaleTopic, Examples) {
  const auto g = two_topic_edge(0.4, 0.9);
  EXPECT_EQ(scale_topic(g, 1, 0.0)[0], 0.0);
  EXPECT_EQ(scale_topic(g, 1, 1.0)[0], 0.9);
  EXPECT_DOUBLE_EQ(scale_topic(g, 0, 0.5)[0], 0.2);
  EXPECT_THROW(scale_topic(g, 0, 1.5), InvalidInput);
  EXPECT_THROW(scale_topic(g, 0, -0.1), InvalidInput);
  EXPECT_THROW(scale_topic(g, 2, 0.5), InvalidInput);
}

TEST(NormalizeMixture, Examples) {
  const std::vector<double> a{0.995, 0.005};
  const auto m = normalize_mixture(a);
  EXPECT_EQ(m[0], 1.0);
  EXPECT_EQ(m[1], 0.0);

  const std::vector<double> b{0.5, 0.5};
  const auto n = normalize_mixture(b);
  EXPECT_EQ(n[0], 0.5);
  EXPECT_EQ(n[1], 0.5);

  const std::vector<double> c{0.004, 0.006};
  EXPECT_THROW(normalize_mixture(c), DegenerateMixture);
}

TEST(NormalizeMixture, OutputAlwaysValid) {
  std::mt19937_64 rng(5);
  std::exponential_distribution<double> draw(1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> raw(1 + trial % 7);
    for (auto& x : raw) x = draw(rng) * 0.01;
    try {
      const auto m = normalize_mixture(raw);
      double sum = 0.0;
      for (double w : m.weights()) {
        EXPECT_TRUE(w == 0.0 || w >= 0.0);
        sum += w;
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
    } catch (const DegenerateMixture&) {
      for (double x : raw) EXPECT_LT(x, 0.01);
    }
  }
}

TEST(TopicMixture, Validation) {
  EXPECT_THROW(TopicMixture({0.5, 0.4}), InvalidInput);
  EXPECT_THROW(TopicMixture({1.2, -0.2}), InvalidInput);
  EXPECT_THROW(TopicMixture(std::vector<double>{}), InvalidInput);
  const TopicMixture clamped({1.0, -1e-13});
  EXPECT_EQ(clamped[1], 0.0);
  EXPECT_EQ(TopicMixture({0.0, 1.0, 0.0}).support(), std::vector<TopicId>{1});
}

TEST(GraphBuilder, RejectsBadInput) {
  EXPECT_THROW(GraphBuilder(0, 1), InvalidInput);
  EXPECT_THROW(GraphBuilder(3, 0), InvalidInput);
  GraphBuilder b(3, 2);
  EXPECT_THROW(b.add(0, 3, 0, 0.5), InvalidInput);
  EXPECT_THROW(b.add(0, 1, 2, 0.5), InvalidInput);
  EXPECT_THROW(b.add(0, 1, 0, 1.5), InvalidInput);
  EXPECT_THROW(b.add(1, 1, 0, 0.5), InvalidInput);
  b.add(0, 1, 0, 0.5).add(0, 1, 0, 0.25);
  EXPECT_THROW(std::move(b).build(), InvalidInput);
}

TEST(GraphBuilder, MergesTopicsIntoOneEdge) {
  GraphBuilder b(3, 3);
  b.add(2, 0, 1, 0.3).add(0, 2, 2, 0.1).add(0, 2, 0, 0.6).add(0, 1, 1, 0.0);
  const auto g = std::move(b).build();
  ASSERT_EQ(g.edge_count(), 3u);
  EXPECT_EQ(g.out_degree(0), 2u);
  const auto e = g.find_edge(0, 2);
  ASSERT_TRUE(e);
  EXPECT_EQ(g.topics(*e).size(), 2u);
  EXPECT_EQ(g.probability(*e, 0), 0.6);
  EXPECT_EQ(g.probability(*e, 1), 0.0);
  EXPECT_EQ(g.probability(*e, 2), 0.1);
  EXPECT_FALSE(g.find_edge(1, 0));
}

TEST(GraphIo, RoundTripIsIdentity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    GraphBuilder b(20, 3);
    std::set<std::pair<NodeId, NodeId>> used;
    for (int i = 0; i < 60; ++i) {
      const auto s = static_cast<NodeId>(rng() % 20), t = static_cast<NodeId>(rng() % 20);
      if (s != t && used.insert({s, t}).second) {
        if (u(rng) < 0.1) {
          b.add_edge(s, t);
        } else {
          b.add(s, t, static_cast<TopicId>(rng() % 3), u(rng));
        }
      }
    }
    const auto g = std::move(b).build();
    const auto text = graph_to_string(g);
    const auto back = read_graph_string(text);
    EXPECT_EQ(back, g);
    EXPECT_EQ(graph_to_string(back), text);
    EXPECT_EQ(graph_fingerprint(back), graph_fingerprint(g));
  }
}

TEST(GraphIo, AccumulatesTopicsAndRejectsDuplicates) {
  const auto g = read_graph_string("timax-graph v1 nodes=3 topics=2\n0 1 0 0.5\n0 1 1 0.25\n# comment\n\n1 2 1 1\n");
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.probability(0, 1), 0.25);
  try {
    read_graph_string("timax-graph v1 nodes=3 topics=2\n0 1 0 0.5\n0 1 0 0.25\n");
    FAIL() << "duplicate accepted";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(GraphIo, FormatErrors) {
  EXPECT_THROW(read_graph_string(""), FormatError);
  EXPECT_THROW(read_graph_string("timax-graph v2 nodes=3 topics=1\n"), FormatError);
  EXPECT_THROW(read_graph_string("timax-graph v1 nodes=3\n"), FormatError);
  EXPECT_THROW(read_graph_string("timax-graph v1 nodes=3 topics=1\n0 1 0\n"), FormatError);
  EXPECT_THROW(read_graph_string("timax-graph v1 nodes=3 topics=1\n0 5 0 0.1\n"), FormatError);
  EXPECT_THROW(read_graph_string("timax-graph v1 nodes=3 topics=1\n0 1 1 0.1\n"), FormatError);
  EXPECT_THROW(read_graph_string("timax-graph v1 nodes=3 topics=1\n0 1 0 1.1\n"), FormatError);
  EXPECT_THROW(read_graph_string("timax-graph v1 nodes=3 topics=1\n0 0 0 0.1\n"), FormatError);
  EXPECT_THROW(read_graph_string("timax-graph v1 nodes=3 topics=1\n0 1 0 abc\n"), FormatError);
}

TEST(GraphIo, FingerprintDetectsChanges) {
  const auto a = two_topic_edge(0.2, 0.4);
  const auto b = two_topic_edge(0.2, 0.40000000000000002);  // same double
  const auto c = two_topic_edge(0.2, 0.41);
  EXPECT_EQ(graph_fingerprint(a), graph_fingerprint(b));
  EXPECT_NE(graph_fingerprint(a), graph_fingerprint(c));
}

TEST(NodeLabels, FallsBackToIds) {
  std::istringstream in("0 alice\n# x\n2 carol\n");
  const auto labels = NodeLabels::read(in);
  EXPECT_EQ(labels.label(0), "alice");
  EXPECT_EQ(labels.label(1), "1");
  EXPECT_EQ(labels.label(2), "carol");
}
