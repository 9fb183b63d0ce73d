#pragma once

// Hand-built landmark indexes for query and I/O tests.

#include <utility>
#include <vector>

#include "timax/preprocess.hpp"

namespace timax::testing {

using SeedList = std::vector<std::pair<NodeId, double>>;  // (node, marginal)

inline IndexEntry make_entry(TopicId topic, double landmark, const SeedList& seeds) {
  IndexEntry e;
  e.topic = topic;
  e.landmark = landmark;
  double cumulative = 0.0;
  for (std::size_t r = 0; r < seeds.size(); ++r) {
    cumulative += seeds[r].second;
    e.result.seeds.push_back({seeds[r].first, r + 1, seeds[r].second, cumulative});
  }
  e.result.spread = cumulative;
  e.result.oracle = OracleConfig::exact();
  return e;
}

/// Index with `topics` topics over `landmarks`; `fill(topic, landmark)` gives
/// each entry's seed list. All lists must have the same length.
template <class Fill>
LandmarkIndex make_index(std::size_t topics, const LandmarkSet& landmarks, std::size_t k, Fill fill) {
  std::vector<IndexEntry> entries;
  for (TopicId i = 0; i < topics; ++i) {
    for (double l : landmarks.values()) entries.push_back(make_entry(i, l, fill(i, l)));
  }
  return LandmarkIndex("0000000000000000", k, topics, landmarks, "greedy", OracleConfig::exact(), std::move(entries));
}

/// The lambda = 0 list: the k lowest ids, each activating only itself.
inline SeedList zero_entry(std::size_t k) {
  SeedList s;
  for (std::size_t v = 0; v < k; ++v) s.emplace_back(static_cast<NodeId>(v), 1.0);
  return s;
}

}  // namespace timax::testing
