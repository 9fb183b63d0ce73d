#include <gtest/gtest.h>

#include <set>

#include "timax/analysis.hpp"
#include "timax/generator.hpp"
#include "timax/graph_io.hpp"

using namespace timax;

TEST(Generator, SeparableAtZeroOverlap) {
  GeneratorSpec spec;
  spec.nodes = 300;
  spec.edges = 1500;
  spec.topics = 3;
  spec.seed = 4;
  const auto g = generate_graph(spec);
  EXPECT_EQ(g.edge_count(), 1500u);
  const auto r = overlap_coefficients(g, 0.0);
  for (TopicId i = 0; i < 3; ++i) {
    for (TopicId j = i + 1; j < 3; ++j) EXPECT_EQ(r.node_overlap(i, j), 0.0);
  }
}

TEST(Generator, TrivalencyLevels) {
  GeneratorSpec spec;
  spec.nodes = 200;
  spec.edges = 1000;
  spec.topics = 2;
  spec.overlap = 0.5;
  spec.seed = 5;
  const auto g = generate_graph(spec);
  std::set<double> levels;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    for (const auto& [t, p] : g.topics(e)) levels.insert(p);
  }
  EXPECT_EQ(levels, (std::set<double>{0.001, 0.01, 0.1}));
  // Shared nodes make the topics overlap.
  EXPECT_GT(*overlap_coefficients(g, 0.0).node_overlap(0, 1), 0.0);
}

TEST(Generator, RandomUniformRange) {
  GeneratorSpec spec;
  spec.nodes = 100;
  spec.edges = 400;
  spec.model = ProbabilityModel::random_uniform;
  spec.max_probability = 0.3;
  spec.seed = 6;
  const auto g = generate_graph(spec);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    for (const auto& [t, p] : g.topics(e)) {
      EXPECT_GT(p, 0.0);
      EXPECT_LE(p, 0.3);
    }
  }
}

TEST(Generator, DeterministicGivenSeed) {
  GeneratorSpec spec;
  spec.nodes = 150;
  spec.edges = 600;
  spec.topics = 4;
  spec.overlap = 0.2;
  spec.seed = 7;
  EXPECT_EQ(graph_to_string(generate_graph(spec)), graph_to_string(generate_graph(spec)));
  auto other = spec;
  other.seed = 8;
  EXPECT_NE(graph_to_string(generate_graph(spec)), graph_to_string(generate_graph(other)));
}

TEST(Generator, RejectsInfeasibleSpecs) {
  GeneratorSpec spec;
  spec.nodes = 10;
  spec.topics = 2;
  spec.edges = 41;  // two private blocks of 5 hold 2 * 20 ordered pairs
  EXPECT_THROW(generate_graph(spec), InvalidInput);
  spec.edges = 40;
  EXPECT_EQ(generate_graph(spec).edge_count(), 40u);
  spec.overlap = 1.5;
  EXPECT_THROW(generate_graph(spec), InvalidInput);
  EXPECT_THROW(parse_probability_model("gaussian"), InvalidInput);
}
