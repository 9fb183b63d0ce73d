#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "timax/error.hpp"

namespace timax {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;
using TopicId = std::uint32_t;

struct TopicProbability {
  TopicId topic;
  double probability;

  friend bool operator==(const TopicProbability&, const TopicProbability&) = default;
};

/// One probability per edge of a TopicGraph, indexed by EdgeId. This is the
/// "p" every diffusion routine consumes: a per-topic table, a scaled topic, or
/// a mixture all materialize into this form.
class EdgeProbabilities {
 public:
  EdgeProbabilities() = default;
  explicit EdgeProbabilities(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](EdgeId e) const noexcept { return values_[e]; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const EdgeProbabilities&, const EdgeProbabilities&) = default;

 private:
  std::vector<double> values_;
};

/// Directed graph with d per-topic influence probabilities per edge, stored in
/// CSR form keyed by source. Only nonzero topic probabilities are stored.
/// Immutable once built; see GraphBuilder.
class TopicGraph {
 public:
  TopicGraph() = default;

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t topic_count() const noexcept { return topic_count_; }
  std::size_t edge_count() const noexcept { return targets_.size(); }

  EdgeId edges_begin(NodeId u) const noexcept { return offsets_[u]; }
  EdgeId edges_end(NodeId u) const noexcept { return offsets_[u + 1]; }
  std::size_t out_degree(NodeId u) const noexcept { return offsets_[u + 1] - offsets_[u]; }

  NodeId source(EdgeId e) const noexcept { return sources_[e]; }
  NodeId target(EdgeId e) const noexcept { return targets_[e]; }

  std::span<const TopicProbability> topics(EdgeId e) const noexcept {
    return {entries_.data() + entry_offsets_[e], entries_.data() + entry_offsets_[e + 1]};
  }

  double probability(EdgeId e, TopicId topic) const noexcept {
    for (const auto& entry : topics(e)) {
      if (entry.topic == topic) return entry.probability;
    }
    return 0.0;
  }

  std::optional<EdgeId> find_edge(NodeId u, NodeId v) const {
    if (u >= node_count_) return std::nullopt;
    auto first = targets_.begin() + offsets_[u];
    auto last = targets_.begin() + offsets_[u + 1];
    auto it = std::lower_bound(first, last, v);
    if (it == last || *it != v) return std::nullopt;
    return static_cast<EdgeId>(it - targets_.begin());
  }

  friend bool operator==(const TopicGraph&, const TopicGraph&) = default;

 private:
  friend class GraphBuilder;

  std::size_t node_count_ = 0;
  std::size_t topic_count_ = 0;
  std::vector<EdgeId> offsets_{0};
  std::vector<NodeId> sources_;
  std::vector<NodeId> targets_;
  std::vector<std::uint32_t> entry_offsets_{0};
  std::vector<TopicProbability> entries_;
};

/// Accumulates (u, v, topic, probability) entries and produces a TopicGraph.
/// Entries for the same (u, v) with different topics merge into one edge.
class GraphBuilder {
 public:
  GraphBuilder(std::size_t node_count, std::size_t topic_count)
      : node_count_(node_count), topic_count_(topic_count) {
    if (node_count == 0) throw InvalidInput("graph needs at least one node");
    if (topic_count == 0) throw InvalidInput("graph needs at least one topic");
    if (node_count > std::size_t{UINT32_MAX}) throw InvalidInput("node count exceeds 32-bit ids");
  }

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t topic_count() const noexcept { return topic_count_; }

  /// Declare an edge without topic probabilities (all topics zero).
  GraphBuilder& add_edge(NodeId u, NodeId v) {
    check_endpoints(u, v);
    if (u == v) return *this;
    raw_.push_back({u, v, kNoTopic, 0.0});
    return *this;
  }

  /// Duplicate (u, v, topic) entries are rejected at build().
  GraphBuilder& add(NodeId u, NodeId v, TopicId topic, double probability) {
    check_endpoints(u, v);
    if (topic >= topic_count_) {
      throw InvalidInput("topic " + std::to_string(topic) + " out of range [0, " +
                         std::to_string(topic_count_) + ")");
    }
    if (!(probability >= 0.0 && probability <= 1.0)) {
      throw InvalidInput("probability " + std::to_string(probability) + " outside [0,1]");
    }
    if (u == v) {
      if (probability > 0.0) throw InvalidInput("self-loop on node " + std::to_string(u) + " carries nonzero probability");
      return *this;
    }
    raw_.push_back({u, v, topic, probability});
    return *this;
  }

  TopicGraph build() && {
    std::sort(raw_.begin(), raw_.end(), [](const Raw& a, const Raw& b) {
      return std::tie(a.u, a.v, a.topic) < std::tie(b.u, b.v, b.topic);
    });
    TopicGraph g;
    g.node_count_ = node_count_;
    g.topic_count_ = topic_count_;
    g.offsets_.assign(node_count_ + 1, 0);
    for (std::size_t i = 0; i < raw_.size(); ++i) {
      const Raw& r = raw_[i];
      const bool new_edge = g.targets_.empty() || g.sources_.back() != r.u || g.targets_.back() != r.v;
      if (new_edge) {
        g.sources_.push_back(r.u);
        g.targets_.push_back(r.v);
        g.entry_offsets_.push_back(g.entry_offsets_.back());
        ++g.offsets_[r.u + 1];
      }
      if (r.topic == kNoTopic) continue;
      if (i > 0 && raw_[i - 1].u == r.u && raw_[i - 1].v == r.v && raw_[i - 1].topic == r.topic) {
        throw InvalidInput("duplicate entry for edge (" + std::to_string(r.u) + "," + std::to_string(r.v) +
                           ") topic " + std::to_string(r.topic));
      }
      if (r.probability > 0.0) {
        g.entries_.push_back({r.topic, r.probability});
        ++g.entry_offsets_.back();
      }
    }
    if (g.targets_.size() > std::size_t{UINT32_MAX}) throw InvalidInput("edge count exceeds 32-bit ids");
    std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
    raw_.clear();
    return g;
  }

 private:
  static constexpr TopicId kNoTopic = UINT32_MAX;

  struct Raw {
    NodeId u;
    NodeId v;
    TopicId topic;
    double probability;
  };

  void check_endpoints(NodeId u, NodeId v) const {
    if (u >= node_count_ || v >= node_count_) {
      throw InvalidInput("edge (" + std::to_string(u) + "," + std::to_string(v) + ") has node id outside [0, " +
                         std::to_string(node_count_) + ")");
    }
  }

  std::size_t node_count_;
  std::size_t topic_count_;
  std::vector<Raw> raw_;
};

/// Topic mixture (lambda_1, ..., lambda_d): nonnegative weights summing to 1.
class TopicMixture {
 public:
  static constexpr double kSumTolerance = 1e-9;
  static constexpr double kNegativeClamp = 1e-12;

  explicit TopicMixture(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw InvalidInput("mixture has no topics");
    double sum = 0.0;
    for (double& w : weights_) {
      if (!std::isfinite(w)) throw InvalidInput("mixture weight is not finite");
      if (w < 0.0) {
        if (w < -kNegativeClamp) throw InvalidInput("mixture weight " + std::to_string(w) + " is negative");
        w = 0.0;
      }
      if (w > 1.0 + kSumTolerance) throw InvalidInput("mixture weight " + std::to_string(w) + " exceeds 1");
      sum += w;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw InvalidInput("mixture weights sum to " + std::to_string(sum) + ", expected 1");
    }
  }

  static TopicMixture one_hot(std::size_t dimension, TopicId topic) {
    if (topic >= dimension) throw InvalidInput("one-hot topic out of range");
    std::vector<double> w(dimension, 0.0);
    w[topic] = 1.0;
    return TopicMixture(std::move(w));
  }

  static TopicMixture uniform(std::size_t dimension) {
    if (dimension == 0) throw InvalidInput("mixture has no topics");
    return TopicMixture(std::vector<double>(dimension, 1.0 / static_cast<double>(dimension)));
  }

  std::size_t dimension() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const noexcept { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }

  /// Topics with strictly positive weight.
  std::vector<TopicId> support() const {
    std::vector<TopicId> out;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      if (weights_[i] > 0.0) out.push_back(static_cast<TopicId>(i));
    }
    return out;
  }

  friend bool operator==(const TopicMixture&, const TopicMixture&) = default;

 private:
  std::vector<double> weights_;
};

/// p(e) = sum_i lambda_i * p_i(e).
inline EdgeProbabilities mix_probabilities(const TopicGraph& graph, const TopicMixture& mixture) {
  if (mixture.dimension() != graph.topic_count()) {
    throw InvalidInput("mixture has " + std::to_string(mixture.dimension()) + " topics, graph has " +
                       std::to_string(graph.topic_count()));
  }
  std::vector<double> p(graph.edge_count(), 0.0);
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    double sum = 0.0;
    for (const auto& [topic, prob] : graph.topics(e)) sum += mixture[topic] * prob;
    p[e] = std::min(sum, 1.0);
  }
  return EdgeProbabilities(std::move(p));
}

/// p(e) = lambda * p_topic(e).
inline EdgeProbabilities scale_topic(const TopicGraph& graph, TopicId topic, double lambda) {
  if (topic >= graph.topic_count()) throw InvalidInput("topic " + std::to_string(topic) + " out of range");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidInput("scale " + std::to_string(lambda) + " outside [0,1]");
  std::vector<double> p(graph.edge_count(), 0.0);
  if (lambda > 0.0) {
    for (EdgeId e = 0; e < graph.edge_count(); ++e) p[e] = lambda * graph.probability(e, topic);
  }
  return EdgeProbabilities(std::move(p));
}

inline EdgeProbabilities topic_probabilities(const TopicGraph& graph, TopicId topic) {
  return scale_topic(graph, topic, 1.0);
}

inline EdgeProbabilities uniform_probabilities(const TopicGraph& graph, double value) {
  if (!(value >= 0.0 && value <= 1.0)) throw InvalidInput("probability outside [0,1]");
  return EdgeProbabilities(std::vector<double>(graph.edge_count(), value));
}

/// Zero every weight below `floor`, then renormalize the survivors to sum 1.
inline TopicMixture normalize_mixture(std::span<const double> raw, double floor = 0.01) {
  if (raw.empty()) throw InvalidInput("mixture has no topics");
  std::vector<double> w(raw.begin(), raw.end());
  double kept = 0.0;
  for (double& x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("raw mixture weight must be finite and nonnegative");
    if (x < floor) x = 0.0;
    kept += x;
  }
  if (kept <= 0.0) throw DegenerateMixture("every mixture weight is below " + std::to_string(floor));
  for (double& x : w) x /= kept;
  // Absorb rounding so the sum is 1 to within a few ulps.
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  auto largest = std::max_element(w.begin(), w.end());
  *largest += 1.0 - sum;
  return TopicMixture(std::move(w));
}

}  // namespace timax
