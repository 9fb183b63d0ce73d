#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "timax/diffusion.hpp"
#include "timax/error.hpp"
#include "timax/graph.hpp"
#include "timax/parallel.hpp"

namespace timax {

/// A seed in greedy order with the marginal influence it had when picked.
struct SeedRecord {
  NodeId node = 0;
  std::size_t rank = 0;  // 1-based
  double marginal = 0.0;
  double cumulative = 0.0;

  friend bool operator==(const SeedRecord&, const SeedRecord&) = default;
};

struct GreedyResult {
  std::vector<SeedRecord> seeds;
  OracleConfig oracle;
  double spread = 0.0;
  std::optional<double> standard_error;

  std::vector<NodeId> nodes() const {
    std::vector<NodeId> out;
    out.reserve(seeds.size());
    for (const auto& s : seeds) out.push_back(s.node);
    return out;
  }

  friend bool operator==(const GreedyResult&, const GreedyResult&) = default;
};

namespace detail {

struct QueueEntry {
  double gain;
  NodeId node;
  std::size_t round;
};

// Max-heap on gain; equal gains pop the lowest node id first.
struct QueueOrder {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const noexcept {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.node > b.node;
  }
};

}  // namespace detail

/// Lazy-evaluation (CELF) greedy over any incremental marginal oracle. Cached
/// gains are upper bounds on current gains by submodularity; a node whose gain
/// was computed in the current round and sits on top of the queue is selected.
/// Ties go to the lowest node id. The initial round is scored on `workers`
/// threads; everything after it is serial.
template <class Oracle>
GreedyResult lazy_greedy(Oracle& oracle, std::size_t k, std::size_t workers = 1) {
  const std::size_t n = oracle.node_count();
  k = std::min(k, n);
  GreedyResult result;
  if (k == 0) return result;

  std::vector<double> initial(n, 0.0);
  const std::size_t chunks = std::max<std::size_t>(1, std::min(workers, n));
  parallel_for(chunks, workers, [&](std::size_t c) {
    auto scratch = oracle.make_scratch();
    for (std::size_t v = c * n / chunks; v < (c + 1) * n / chunks; ++v) {
      initial[v] = oracle.marginal(static_cast<NodeId>(v), scratch);
    }
  });

  std::vector<detail::QueueEntry> heap;
  heap.reserve(n);
  for (std::size_t v = 0; v < n; ++v) heap.push_back({initial[v], static_cast<NodeId>(v), 1});
  std::priority_queue queue(detail::QueueOrder{}, std::move(heap));

  auto scratch = oracle.make_scratch();
  double cumulative = 0.0;
  for (std::size_t round = 1; round <= k; ++round) {
    for (;;) {
      detail::QueueEntry top = queue.top();
      queue.pop();
      if (top.round == round) {
        oracle.commit(top.node);
        cumulative += top.gain;
        result.seeds.push_back({top.node, round, top.gain, cumulative});
        break;
      }
      top.gain = oracle.marginal(top.node, scratch);
      top.round = round;
      queue.push(top);
    }
  }
  result.spread = cumulative;
  result.standard_error = oracle.standard_error();
  return result;
}

/// Greedy seed selection (lazy evaluation) of up to k seeds under p.
inline GreedyResult greedy_select(const TopicGraph& graph, const EdgeProbabilities& p, std::size_t k,
                                  const OracleConfig& oracle, std::size_t workers = 1) {
  GreedyResult result;
  if (oracle.is_exact()) {
    ExactMarginalOracle exact(graph, p);
    result = lazy_greedy(exact, k, workers);
  } else {
    SampledMarginalOracle sampled(graph, p, oracle.runs, oracle.seed);
    result = lazy_greedy(sampled, k, workers);
  }
  result.oracle = oracle;
  return result;
}

enum class BaselineMethod { to_degree, random, ta_weighted_degree, ta_pagerank, to_greedy };

inline std::string_view to_string(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::to_degree: return "to_degree";
    case BaselineMethod::random: return "random";
    case BaselineMethod::ta_weighted_degree: return "ta_weighted_degree";
    case BaselineMethod::ta_pagerank: return "ta_pagerank";
    case BaselineMethod::to_greedy: return "to_greedy";
  }
  return "?";
}

inline BaselineMethod parse_baseline(std::string_view name) {
  for (auto m : {BaselineMethod::to_degree, BaselineMethod::random, BaselineMethod::ta_weighted_degree,
                 BaselineMethod::ta_pagerank, BaselineMethod::to_greedy}) {
    if (to_string(m) == name) return m;
  }
  throw InvalidInput("unknown baseline method '" + std::string(name) + "'");
}

/// Indices of the k largest scores, descending; ties go to the lower index.
inline std::vector<NodeId> top_k_by_score(std::span<const double> scores, std::size_t k) {
  std::vector<NodeId> order(scores.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  k = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](NodeId a, NodeId b) { return scores[a] != scores[b] ? scores[a] > scores[b] : a < b; });
  order.resize(k);
  return order;
}

struct PageRankOptions {
  double damping = 0.85;
  std::size_t max_iterations = 100;
  double tolerance = 1e-10;  // L1 change between iterations
};

/// PageRank on the reversed influence graph: node v passes its mass to the
/// sources of its in-edges, in proportion to their influence probability on v.
/// Nodes with no positive in-probability spread their mass uniformly.
inline std::vector<double> influence_pagerank(const TopicGraph& graph, const EdgeProbabilities& p,
                                              const PageRankOptions& options = {}) {
  if (p.size() != graph.edge_count()) throw InvalidInput("probability function does not match graph");
  const std::size_t n = graph.node_count();
  const double nd = static_cast<double>(n);
  std::vector<double> in_weight(n, 0.0);
  for (EdgeId e = 0; e < graph.edge_count(); ++e) in_weight[graph.target(e)] += p[e];

  std::vector<double> rank(n, 1.0 / nd);
  std::vector<double> next(n);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    double dangling = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_weight[v] <= 0.0) dangling += rank[v];
    }
    const double base = (1.0 - options.damping) / nd + options.damping * dangling / nd;
    for (NodeId u = 0; u < n; ++u) {
      double inflow = 0.0;
      for (EdgeId e = graph.edges_begin(u); e < graph.edges_end(u); ++e) {
        const NodeId v = graph.target(e);
        if (p[e] > 0.0) inflow += rank[v] * p[e] / in_weight[v];
      }
      next[u] = base + options.damping * inflow;
    }
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) change += std::abs(next[v] - rank[v]);
    rank.swap(next);
    if (change < options.tolerance) break;
  }
  return rank;
}

/// Sum of outgoing influence probability per node.
inline std::vector<double> weighted_out_degree(const TopicGraph& graph, const EdgeProbabilities& p) {
  if (p.size() != graph.edge_count()) throw InvalidInput("probability function does not match graph");
  std::vector<double> w(graph.node_count(), 0.0);
  for (EdgeId e = 0; e < graph.edge_count(); ++e) w[graph.source(e)] += p[e];
  return w;
}

struct BaselineOptions {
  std::optional<TopicMixture> mixture;  // required by the ta_* methods
  std::uint64_t seed = 0;               // random
  OracleConfig oracle;                  // to_greedy
  std::size_t workers = 1;
};

inline std::vector<NodeId> select_baseline(const TopicGraph& graph, BaselineMethod method, std::size_t k,
                                           const BaselineOptions& options = {}) {
  const auto mixed = [&] {
    if (!options.mixture) throw InvalidInput(std::string(to_string(method)) + " needs a topic mixture");
    return mix_probabilities(graph, *options.mixture);
  };
  switch (method) {
    case BaselineMethod::to_degree: {
      std::vector<double> degree(graph.node_count());
      for (NodeId u = 0; u < graph.node_count(); ++u) degree[u] = static_cast<double>(graph.out_degree(u));
      return top_k_by_score(degree, k);
    }
    case BaselineMethod::random: {
      std::vector<NodeId> nodes(graph.node_count());
      std::iota(nodes.begin(), nodes.end(), NodeId{0});
      std::mt19937_64 rng(options.seed);
      k = std::min(k, nodes.size());
      for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, nodes.size() - 1);
        std::swap(nodes[i], nodes[pick(rng)]);
      }
      nodes.resize(k);
      return nodes;
    }
    case BaselineMethod::ta_weighted_degree: return top_k_by_score(weighted_out_degree(graph, mixed()), k);
    case BaselineMethod::ta_pagerank: return top_k_by_score(influence_pagerank(graph, mixed()), k);
    case BaselineMethod::to_greedy: {
      const auto p = mix_probabilities(graph, TopicMixture::uniform(graph.topic_count()));
      return greedy_select(graph, p, k, options.oracle, options.workers).nodes();
    }
  }
  throw InvalidInput("unknown baseline method");
}

}  // namespace timax
