#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "timax/error.hpp"
#include "timax/graph.hpp"

namespace timax {

enum class ProbabilityModel {
  trivalency,      // each probability drawn from {0.1, 0.01, 0.001}
  random_uniform,  // uniform on (0, max_probability]
};

inline ProbabilityModel parse_probability_model(std::string_view name) {
  if (name == "trivalency") return ProbabilityModel::trivalency;
  if (name == "random_uniform") return ProbabilityModel::random_uniform;
  throw InvalidInput("unknown probability model '" + std::string(name) + "'");
}

struct GeneratorSpec {
  std::size_t nodes = 1000;
  std::size_t edges = 5000;
  std::size_t topics = 2;
  ProbabilityModel model = ProbabilityModel::trivalency;
  double overlap = 0.0;  // fraction of nodes shared by every topic
  double max_probability = 1.0;
  double degree_skew = 1.5;  // Pareto shape of per-node source weights; larger is flatter
  std::uint64_t seed = 0;
};

/// Synthetic topic graph. A fraction `overlap` of the nodes is shared by all
/// topics; the rest is split evenly into one private block per topic. Each edge
/// picks a topic, then a source (weighted by a heavy-tailed per-node weight)
/// and a distinct target from that topic's nodes, and gets a probability for
/// that topic. Edges between two shared nodes additionally carry each other
/// topic with probability 1/2. With overlap 0 the topics live on disjoint node
/// sets, so the graph is fully separable.
inline TopicGraph generate_graph(const GeneratorSpec& spec) {
  if (spec.nodes < 2) throw InvalidInput("generator needs at least two nodes");
  if (spec.topics == 0) throw InvalidInput("generator needs at least one topic");
  if (!(spec.overlap >= 0.0 && spec.overlap <= 1.0)) throw InvalidInput("overlap fraction must be in [0,1]");
  if (!(spec.max_probability > 0.0 && spec.max_probability <= 1.0)) throw InvalidInput("max probability must be in (0,1]");
  if (!(spec.degree_skew > 0.0)) throw InvalidInput("degree skew must be positive");

  std::mt19937_64 rng(spec.seed);
  std::vector<NodeId> order(spec.nodes);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::shuffle(order.begin(), order.end(), rng);

  const auto shared_count = static_cast<std::size_t>(std::llround(spec.overlap * static_cast<double>(spec.nodes)));
  const std::vector<NodeId> shared(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(shared_count));
  std::vector<std::vector<NodeId>> members(spec.topics, shared);
  for (std::size_t i = shared_count; i < spec.nodes; ++i) {
    members[(i - shared_count) % spec.topics].push_back(order[i]);
  }

  // Ordered pairs available: inside the shared set once, plus each topic's
  // pairs that touch its private block.
  const auto pairs = [](std::size_t n) { return n * (n > 0 ? n - 1 : 0); };
  std::size_t capacity = pairs(shared_count);
  for (const auto& m : members) capacity += pairs(m.size()) - pairs(shared_count);
  if (spec.edges > capacity) {
    throw InvalidInput("cannot place " + std::to_string(spec.edges) + " distinct edges; at most " +
                       std::to_string(capacity) + " fit this layout");
  }

  std::vector<TopicId> usable;
  for (TopicId t = 0; t < spec.topics; ++t) {
    if (members[t].size() >= 2) usable.push_back(t);
  }
  if (usable.empty() && spec.edges > 0) throw InvalidInput("no topic has two nodes to connect");

  std::vector<double> weight(spec.nodes);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& w : weight) w = std::pow(1.0 - unit(rng), -1.0 / spec.degree_skew);
  std::vector<std::discrete_distribution<std::size_t>> source_pick;
  for (const auto& m : members) {
    std::vector<double> w;
    for (NodeId v : m) w.push_back(weight[v]);
    source_pick.emplace_back(w.begin(), w.end());
  }
  std::vector<char> is_shared(spec.nodes, 0);
  for (NodeId v : shared) is_shared[v] = 1;

  auto draw_probability = [&]() -> double {
    if (spec.model == ProbabilityModel::trivalency) {
      static constexpr double levels[] = {0.1, 0.01, 0.001};
      return levels[std::uniform_int_distribution<int>(0, 2)(rng)];
    }
    return spec.max_probability * (1.0 - unit(rng));
  };

  GraphBuilder builder(spec.nodes, spec.topics);
  std::unordered_set<std::uint64_t> used;
  used.reserve(spec.edges * 2);
  std::uniform_int_distribution<std::size_t> topic_pick(0, usable.empty() ? 0 : usable.size() - 1);
  const std::size_t max_attempts = 200 * spec.edges + 10000;
  std::size_t attempts = 0;
  while (used.size() < spec.edges) {
    if (++attempts > max_attempts) throw InvalidInput("edge placement did not converge; lower the edge count");
    const TopicId t = usable[topic_pick(rng)];
    const auto& m = members[t];
    const NodeId u = m[source_pick[t](rng)];
    const NodeId v = m[std::uniform_int_distribution<std::size_t>(0, m.size() - 1)(rng)];
    if (u == v) continue;
    if (!used.insert((std::uint64_t{u} << 32) | v).second) continue;
    builder.add(u, v, t, draw_probability());
    if (is_shared[u] && is_shared[v]) {
      for (TopicId other = 0; other < spec.topics; ++other) {
        if (other != t && unit(rng) < 0.5) builder.add(u, v, other, draw_probability());
      }
    }
  }
  return std::move(builder).build();
}

}  // namespace timax
