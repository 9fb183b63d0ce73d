#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "timax/diffusion.hpp"
#include "timax/error.hpp"
#include "timax/graph.hpp"
#include "timax/graph_io.hpp"
#include "timax/parallel.hpp"
#include "timax/selection.hpp"
#include "timax/text.hpp"

namespace timax {

/// Sorted landmark values 0 = l_0 < l_1 < ... < l_m = 1.
class LandmarkSet {
 public:
  explicit LandmarkSet(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw InvalidInput("landmark set needs at least the endpoints 0 and 1");
    if (values_.front() != 0.0 || values_.back() != 1.0) throw InvalidInput("landmarks must start at 0 and end at 1");
    for (std::size_t i = 1; i < values_.size(); ++i) {
      if (!(values_[i - 1] < values_[i])) throw InvalidInput("landmarks must be strictly increasing");
    }
  }

  /// {0, 1/m, 2/m, ..., 1}
  static LandmarkSet uniform(std::size_t intervals) {
    if (intervals == 0) throw InvalidInput("uniform landmark set needs at least one interval");
    std::vector<double> v(intervals + 1);
    for (std::size_t j = 0; j <= intervals; ++j) v[j] = static_cast<double>(j) / static_cast<double>(intervals);
    return LandmarkSet(std::move(v));
  }

  // The eleven landmarks {0, 0.1, ..., 1}.
  static LandmarkSet standard() { return uniform(10); }

  /// Comma-separated decimal values.
  static LandmarkSet parse(std::string_view csv) {
    std::vector<double> v;
    for (auto token : text::split(csv, ',')) {
      const auto x = text::parse_double(token);
      if (!x) throw InvalidInput("malformed landmark value '" + std::string(token) + "'");
      v.push_back(*x);
    }
    return LandmarkSet(std::move(v));
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (i) out += ',';
      out += text::format_double(values_[i]);
    }
    return out;
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t j) const noexcept { return values_[j]; }
  std::span<const double> values() const noexcept { return values_; }

  std::optional<std::size_t> index_of(double value) const {
    auto it = std::lower_bound(values_.begin(), values_.end(), value);
    if (it == values_.end() || *it != value) return std::nullopt;
    return static_cast<std::size_t>(it - values_.begin());
  }

  /// Position of the largest landmark <= lambda.
  std::size_t floor_index(double lambda) const {
    check(lambda);
    auto it = std::upper_bound(values_.begin(), values_.end(), lambda);
    return static_cast<std::size_t>(it - values_.begin()) - 1;
  }

  /// Position of the smallest landmark >= lambda.
  std::size_t ceil_index(double lambda) const {
    check(lambda);
    return static_cast<std::size_t>(std::lower_bound(values_.begin(), values_.end(), lambda) - values_.begin());
  }

  friend bool operator==(const LandmarkSet&, const LandmarkSet&) = default;

 private:
  static void check(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidInput("weight " + std::to_string(lambda) + " outside [0,1]");
  }

  std::vector<double> values_;
};

/// Precomputed greedy result for one (topic, landmark) pair. `result.spread` is
/// sigma(S^g(k, lambda p_i), lambda p_i) under the index's oracle.
struct IndexEntry {
  TopicId topic = 0;
  double landmark = 0.0;
  GreedyResult result;

  friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
};

class LandmarkIndex {
 public:
  LandmarkIndex(std::string fingerprint, std::size_t k, std::size_t topic_count, LandmarkSet landmarks,
                std::string selector, OracleConfig oracle, std::vector<IndexEntry> entries)
      : fingerprint_(std::move(fingerprint)),
        k_(k),
        topic_count_(topic_count),
        landmarks_(std::move(landmarks)),
        selector_(std::move(selector)),
        oracle_(oracle),
        entries_(std::move(entries)) {
    validate();
  }

  const std::string& fingerprint() const noexcept { return fingerprint_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t topic_count() const noexcept { return topic_count_; }
  const LandmarkSet& landmarks() const noexcept { return landmarks_; }
  const std::string& selector() const noexcept { return selector_; }
  const OracleConfig& oracle() const noexcept { return oracle_; }
  std::span<const IndexEntry> entries() const noexcept { return entries_; }

  const IndexEntry& entry(TopicId topic, std::size_t landmark_index) const noexcept {
    return entries_[topic * landmarks_.size() + landmark_index];
  }

  const IndexEntry& entry_at(TopicId topic, double landmark) const {
    const auto j = landmarks_.index_of(landmark);
    if (topic >= topic_count_ || !j) throw InvalidInput("index has no entry for that topic and landmark");
    return entry(topic, *j);
  }

  /// Throws StaleIndex unless the index was built from `graph`.
  void check_graph(const TopicGraph& graph) const {
    const auto fp = graph_fingerprint(graph);
    if (fp != fingerprint_) {
      throw StaleIndex("index fingerprint " + fingerprint_ + " does not match graph fingerprint " + fp);
    }
    if (graph.topic_count() != topic_count_) throw StaleIndex("index topic count does not match graph");
  }

  friend bool operator==(const LandmarkIndex&, const LandmarkIndex&) = default;

 private:
  void validate() const {
    if (k_ == 0) throw InvalidInput("index k must be positive");
    if (topic_count_ == 0) throw InvalidInput("index needs at least one topic");
    if (entries_.size() != topic_count_ * landmarks_.size()) {
      throw InvalidInput("index has " + std::to_string(entries_.size()) + " entries, expected " +
                         std::to_string(topic_count_ * landmarks_.size()));
    }
    std::optional<std::size_t> length;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (e.topic != i / landmarks_.size() || e.landmark != landmarks_[i % landmarks_.size()]) {
        throw InvalidInput("index entries are not in (topic, landmark) order");
      }
      const auto& seeds = e.result.seeds;
      if (seeds.size() > k_) throw InvalidInput("index entry holds more than k seeds");
      if (length && *length != seeds.size()) throw InvalidInput("index entries hold different seed counts");
      length = seeds.size();
      for (std::size_t r = 0; r < seeds.size(); ++r) {
        if (seeds[r].rank != r + 1) throw InvalidInput("index seed ranks must be 1..k in order");
      }
      const double last = seeds.empty() ? 0.0 : seeds.back().cumulative;
      if (last != e.result.spread) throw InvalidInput("index entry spread differs from its last cumulative spread");
    }
  }

  std::string fingerprint_;
  std::size_t k_;
  std::size_t topic_count_;
  LandmarkSet landmarks_;
  std::string selector_;
  OracleConfig oracle_;
  std::vector<IndexEntry> entries_;
};

/// Per-entry seed selector. The index records `name` for provenance.
struct Selector {
  std::string name;
  std::function<GreedyResult(const TopicGraph&, const EdgeProbabilities&, std::size_t k, const OracleConfig&)> select;
};

inline Selector greedy_selector() {
  return {"greedy", [](const TopicGraph& g, const EdgeProbabilities& p, std::size_t k, const OracleConfig& oracle) {
            return greedy_select(g, p, k, oracle);
          }};
}

/// An entry's selector failed; names the (topic, landmark) it failed on.
class IndexBuildError : public Error {
 public:
  IndexBuildError(TopicId topic, double landmark, const std::string& what)
      : Error("index entry (topic=" + std::to_string(topic) + ", landmark=" + text::format_double(landmark) +
              "): " + what),
        topic_(topic),
        landmark_(landmark) {}

  TopicId topic() const noexcept { return topic_; }
  double landmark() const noexcept { return landmark_; }

 private:
  TopicId topic_;
  double landmark_;
};

/// Run the selector on lambda * p_i for every topic i and landmark lambda.
/// Entries are independent jobs spread over `workers` threads; the result does
/// not depend on the worker count.
inline LandmarkIndex build_index(const TopicGraph& graph, std::size_t k, const LandmarkSet& landmarks,
                                 const OracleConfig& oracle, std::size_t workers = 1,
                                 const Selector& selector = greedy_selector()) {
  if (k == 0) throw InvalidInput("k must be at least 1");
  const std::size_t d = graph.topic_count();
  const std::size_t m = landmarks.size();
  std::vector<IndexEntry> entries(d * m);
  parallel_for(d * m, workers, [&](std::size_t job) {
    const auto topic = static_cast<TopicId>(job / m);
    const double lambda = landmarks[job % m];
    try {
      auto result = selector.select(graph, scale_topic(graph, topic, lambda), k, oracle);
      if (!result.seeds.empty()) result.spread = result.seeds.back().cumulative;
      entries[job] = {topic, lambda, std::move(result)};
    } catch (const std::exception& e) {
      throw IndexBuildError(topic, lambda, e.what());
    }
  });
  return LandmarkIndex(graph_fingerprint(graph), k, d, landmarks, selector.name, oracle, std::move(entries));
}

struct MuMax {
  double value = 1.0;  // max(raw, 1)
  double raw = 1.0;
};

/// Largest ratio of stored spread at a landmark to the stored spread at the
/// landmark just below it, over all topics. Any lambda in [0,1] rounds onto
/// such an adjacent pair, so this is the supremum over lambda as well.
inline MuMax mu_max(const LandmarkIndex& index) {
  double raw = 0.0;
  for (TopicId i = 0; i < index.topic_count(); ++i) {
    for (std::size_t j = 0; j + 1 < index.landmarks().size(); ++j) {
      const double lower = index.entry(i, j).result.spread;
      const double upper = index.entry(i, j + 1).result.spread;
      if (lower <= 0.0) throw InvalidInput("index entry has non-positive spread");
      raw = std::max(raw, upper / lower);
    }
  }
  return {std::max(raw, 1.0), raw};
}

}  // namespace timax
