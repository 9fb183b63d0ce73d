#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "timax/error.hpp"
#include "timax/graph.hpp"
#include "timax/preprocess.hpp"

namespace timax {

/// Largest landmark <= lambda.
inline double round_down(double lambda, const LandmarkSet& landmarks) {
  return landmarks[landmarks.floor_index(lambda)];
}

/// Smallest landmark >= lambda.
inline double round_up(double lambda, const LandmarkSet& landmarks) {
  return landmarks[landmarks.ceil_index(lambda)];
}

enum class QueryAlgorithm { bts, mis };

inline std::string_view to_string(QueryAlgorithm a) { return a == QueryAlgorithm::bts ? "bts" : "mis"; }

struct QueryResult {
  QueryAlgorithm algorithm = QueryAlgorithm::mis;
  std::vector<NodeId> seeds;
  std::vector<double> rounded;        // rounded-down mixture weights
  std::vector<double> scores;         // MIS: f(v) per seed, in output order
  std::optional<TopicId> topic;       // BTS: chosen topic
  bool fallback = false;              // every weight rounded down to landmark 0
  bool shortfall = false;             // MIS: fewer than k candidates
  std::chrono::nanoseconds latency{0};
};

namespace detail {

inline void check_query(const LandmarkIndex& index, const TopicMixture& mixture, std::size_t k) {
  if (mixture.dimension() != index.topic_count()) {
    throw InvalidInput("mixture has " + std::to_string(mixture.dimension()) + " topics, index has " +
                       std::to_string(index.topic_count()));
  }
  if (k == 0 || k > index.k()) {
    throw InvalidInput("query k=" + std::to_string(k) + " must be in [1, " + std::to_string(index.k()) + "]");
  }
}

// Largest positive weight, lowest topic on ties, evaluated at its round-up
// landmark. Used when no weight reaches the first positive landmark.
inline const IndexEntry& fallback_entry(const LandmarkIndex& index, const TopicMixture& mixture) {
  TopicId best = 0;
  for (TopicId i = 1; i < mixture.dimension(); ++i) {
    if (mixture[i] > mixture[best]) best = i;
  }
  return index.entry(best, index.landmarks().ceil_index(mixture[best]));
}

inline std::size_t take(const IndexEntry& e, std::size_t k) { return std::min(k, e.result.seeds.size()); }

}  // namespace detail

/// Best Topic Selection: round every weight down onto the landmarks and return
/// the stored seed set of the supported topic whose round-down entry has the
/// largest stored spread. No diffusion is evaluated.
inline QueryResult bts_query(const LandmarkIndex& index, const TopicMixture& mixture, std::size_t k) {
  detail::check_query(index, mixture, k);
  const auto start = std::chrono::steady_clock::now();

  QueryResult out;
  out.algorithm = QueryAlgorithm::bts;
  const auto& landmarks = index.landmarks();
  const std::size_t d = mixture.dimension();
  out.rounded.resize(d);
  std::optional<TopicId> best;
  double best_spread = 0.0;
  bool all_zero = true;
  for (TopicId i = 0; i < d; ++i) {
    const std::size_t j = landmarks.floor_index(mixture[i]);
    out.rounded[i] = landmarks[j];
    if (mixture[i] <= 0.0) continue;
    if (j > 0) all_zero = false;
    const double spread = index.entry(i, j).result.spread;
    if (!best || spread > best_spread) {
      best = i;
      best_spread = spread;
    }
  }
  const IndexEntry* chosen = nullptr;
  if (all_zero) {
    chosen = &detail::fallback_entry(index, mixture);
    out.fallback = true;
  } else {
    chosen = &index.entry(*best, landmarks.floor_index(mixture[*best]));
  }
  out.topic = chosen->topic;
  const std::size_t n = detail::take(*chosen, k);
  out.seeds.reserve(n);
  for (std::size_t r = 0; r < n; ++r) out.seeds.push_back(chosen->result.seeds[r].node);

  out.latency = std::chrono::steady_clock::now() - start;
  return out;
}

/// Marginal Influence Sort: pool the stored seeds of every topic whose weight
/// rounds down to a positive landmark, score each node by the sum of its stored
/// greedy-order marginal influences across those topics, and return the top k
/// (ties to the lowest node id). No diffusion is evaluated.
inline QueryResult mis_query(const LandmarkIndex& index, const TopicMixture& mixture, std::size_t k) {
  detail::check_query(index, mixture, k);
  const auto start = std::chrono::steady_clock::now();

  QueryResult out;
  out.algorithm = QueryAlgorithm::mis;
  const auto& landmarks = index.landmarks();
  const std::size_t d = mixture.dimension();
  out.rounded.resize(d);

  std::vector<std::pair<NodeId, double>> pooled;
  pooled.reserve(d * k);
  for (TopicId i = 0; i < d; ++i) {
    const std::size_t j = landmarks.floor_index(mixture[i]);
    out.rounded[i] = landmarks[j];
    if (j == 0) continue;
    const auto& e = index.entry(i, j);
    for (std::size_t r = 0; r < detail::take(e, k); ++r) pooled.emplace_back(e.result.seeds[r].node, e.result.seeds[r].marginal);
  }

  if (pooled.empty()) {
    const auto& e = detail::fallback_entry(index, mixture);
    out.fallback = true;
    out.topic = e.topic;
    for (std::size_t r = 0; r < detail::take(e, k); ++r) pooled.emplace_back(e.result.seeds[r].node, e.result.seeds[r].marginal);
  }

  // Merge repeated nodes by summing their scores.
  std::sort(pooled.begin(), pooled.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t w = 0;
  for (std::size_t r = 0; r < pooled.size(); ++r) {
    if (w > 0 && pooled[w - 1].first == pooled[r].first) {
      pooled[w - 1].second += pooled[r].second;
    } else {
      pooled[w++] = pooled[r];
    }
  }
  pooled.resize(w);

  const std::size_t n = std::min(k, pooled.size());
  out.shortfall = n < k;
  std::partial_sort(pooled.begin(), pooled.begin() + static_cast<std::ptrdiff_t>(n), pooled.end(),
                    [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; });
  out.seeds.reserve(n);
  out.scores.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    out.seeds.push_back(pooled[r].first);
    out.scores.push_back(pooled[r].second);
  }

  out.latency = std::chrono::steady_clock::now() - start;
  return out;
}

inline QueryResult run_query(QueryAlgorithm algorithm, const LandmarkIndex& index, const TopicMixture& mixture,
                             std::size_t k) {
  return algorithm == QueryAlgorithm::bts ? bts_query(index, mixture, k) : mis_query(index, mixture, k);
}

inline QueryAlgorithm parse_query_algorithm(std::string_view name) {
  if (name == "bts") return QueryAlgorithm::bts;
  if (name == "mis") return QueryAlgorithm::mis;
  throw InvalidInput("unknown query algorithm '" + std::string(name) + "'");
}

}  // namespace timax
