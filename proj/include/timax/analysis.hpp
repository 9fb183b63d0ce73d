#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "timax/diffusion.hpp"
#include "timax/error.hpp"
#include "timax/graph.hpp"
#include "timax/preprocess.hpp"
#include "timax/selection.hpp"
#include "timax/text.hpp"

namespace timax {

// ---------------------------------------------------------------------------
// Topic overlap

/// Edges whose topic probability exceeds theta, ascending.
inline std::vector<EdgeId> qualifying_edges(const TopicGraph& graph, TopicId topic, double theta) {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    if (graph.probability(e, topic) > theta) out.push_back(e);
  }
  return out;
}

/// Nodes whose incident (out + in) probability mass on the topic exceeds
/// theta, ascending.
inline std::vector<NodeId> qualifying_nodes(const TopicGraph& graph, TopicId topic, double theta) {
  std::vector<double> mass(graph.node_count(), 0.0);
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    const double q = graph.probability(e, topic);
    mass[graph.source(e)] += q;
    mass[graph.target(e)] += q;
  }
  std::vector<NodeId> out;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (mass[v] > theta) out.push_back(v);
  }
  return out;
}

struct OverlapSummary {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  std::size_t pairs = 0;  // defined off-diagonal pairs i < j
};

/// Edge and node overlap coefficients |A cap B| / min(|A|, |B|) for every topic
/// pair. A coefficient is absent when either qualifying set is empty.
struct OverlapReport {
  double theta = 0.0;
  std::size_t topics = 0;
  std::vector<std::optional<double>> edge;  // row-major topics x topics
  std::vector<std::optional<double>> node;
  OverlapSummary edge_summary;
  OverlapSummary node_summary;

  std::optional<double> edge_overlap(TopicId i, TopicId j) const { return edge[i * topics + j]; }
  std::optional<double> node_overlap(TopicId i, TopicId j) const { return node[i * topics + j]; }
};

namespace detail {

template <class T>
std::optional<double> overlap_coefficient(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.empty() || b.empty()) return std::nullopt;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) / static_cast<double>(std::min(a.size(), b.size()));
}

inline OverlapSummary summarize_pairs(const std::vector<std::optional<double>>& m, std::size_t d) {
  OverlapSummary s;
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const auto& v = m[i * d + j];
      if (!v) continue;
      if (s.pairs == 0) {
        s.min = s.max = *v;
      } else {
        s.min = std::min(s.min, *v);
        s.max = std::max(s.max, *v);
      }
      sum += *v;
      ++s.pairs;
    }
  }
  if (s.pairs > 0) s.mean = sum / static_cast<double>(s.pairs);
  return s;
}

}  // namespace detail

inline OverlapReport overlap_coefficients(const TopicGraph& graph, double theta) {
  if (!(theta >= 0.0)) throw InvalidInput("overlap threshold must be nonnegative");
  const std::size_t d = graph.topic_count();
  std::vector<std::vector<EdgeId>> edges(d);
  std::vector<std::vector<NodeId>> nodes(d);
  for (TopicId i = 0; i < d; ++i) {
    edges[i] = qualifying_edges(graph, i, theta);
    nodes[i] = qualifying_nodes(graph, i, theta);
  }
  OverlapReport r;
  r.theta = theta;
  r.topics = d;
  r.edge.resize(d * d);
  r.node.resize(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      r.edge[i * d + j] = r.edge[j * d + i] = detail::overlap_coefficient(edges[i], edges[j]);
      r.node[i * d + j] = r.node[j * d + i] = detail::overlap_coefficient(nodes[i], nodes[j]);
    }
  }
  r.edge_summary = detail::summarize_pairs(r.edge, d);
  r.node_summary = detail::summarize_pairs(r.node, d);
  return r;
}

/// Long-format CSV `topic_i,topic_j,overlap` for i < j; undefined pairs are
/// omitted.
inline void write_overlap_csv(std::ostream& out, const OverlapReport& report, bool node_coefficient) {
  const auto& m = node_coefficient ? report.node : report.edge;
  out << "topic_i,topic_j,overlap\n";
  for (std::size_t i = 0; i < report.topics; ++i) {
    for (std::size_t j = i + 1; j < report.topics; ++j) {
      if (const auto& v = m[i * report.topics + j]) out << i << ',' << j << ',' << text::format_double(*v) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Seed-source overlap

struct SeedSourceOverlap {
  double percentage = 0.0;               // mean over mixtures, in [0, 100]
  std::vector<double> per_mixture;       // fractions in [0, 1]
};

/// For each two-topic mixture: the fraction of greedy seeds for the mixed
/// probabilities that also appear among greedy seeds of its constituent topics
/// (each on its unscaled probabilities). When `index` is given and holds
/// landmark 1 with at least k seeds, constituent seed sets come from it.
inline SeedSourceOverlap seed_source_overlap(const TopicGraph& graph, std::span<const TopicMixture> mixtures,
                                             std::size_t k, const OracleConfig& oracle, std::size_t workers = 1,
                                             const LandmarkIndex* index = nullptr) {
  if (mixtures.empty()) throw InvalidInput("seed source overlap needs at least one mixture");
  if (k == 0) throw InvalidInput("k must be at least 1");
  for (const auto& m : mixtures) {
    if (m.dimension() != graph.topic_count()) throw InvalidInput("mixture dimension does not match graph");
    if (m.support().size() != 2) throw InvalidInput("seed source overlap expects mixtures of exactly two topics");
  }
  const bool use_index = index && index->k() >= k && index->landmarks().index_of(1.0).has_value();
  if (use_index) index->check_graph(graph);

  // Constituent seed sets depend only on the topic, so compute each once.
  std::map<TopicId, std::vector<NodeId>> constituent;
  for (const auto& m : mixtures) {
    for (TopicId t : m.support()) {
      if (constituent.contains(t)) continue;
      if (use_index) {
        const auto& seeds = index->entry_at(t, 1.0).result.seeds;
        std::vector<NodeId> nodes;
        for (std::size_t r = 0; r < std::min(k, seeds.size()); ++r) nodes.push_back(seeds[r].node);
        constituent[t] = std::move(nodes);
      } else {
        constituent[t] = greedy_select(graph, topic_probabilities(graph, t), k, oracle, workers).nodes();
      }
    }
  }

  SeedSourceOverlap out;
  double sum = 0.0;
  for (const auto& m : mixtures) {
    const auto mixed = greedy_select(graph, mix_probabilities(graph, m), k, oracle, workers).nodes();
    std::vector<NodeId> pool;
    for (TopicId t : m.support()) pool.insert(pool.end(), constituent[t].begin(), constituent[t].end());
    std::sort(pool.begin(), pool.end());
    std::size_t hits = 0;
    for (NodeId v : mixed) hits += std::binary_search(pool.begin(), pool.end(), v) ? 1 : 0;
    const double fraction = mixed.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(mixed.size());
    out.per_mixture.push_back(fraction);
    sum += fraction;
  }
  out.percentage = 100.0 * sum / static_cast<double>(mixtures.size());
  return out;
}

// ---------------------------------------------------------------------------
// Probability smoothing and statistics

/// Replace every stored probability above `cutoff` by a uniform draw from the
/// same topic's stored probabilities below `cutoff`. Everything else is copied.
inline TopicGraph smooth_probabilities(const TopicGraph& graph, double cutoff, std::uint64_t seed) {
  const std::size_t d = graph.topic_count();
  std::vector<std::vector<double>> pool(d);
  std::vector<std::size_t> above(d, 0);
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    for (const auto& [topic, prob] : graph.topics(e)) {
      if (prob < cutoff) pool[topic].push_back(prob);
      if (prob > cutoff) ++above[topic];
    }
  }
  for (TopicId t = 0; t < d; ++t) {
    if (above[t] > 0 && pool[t].empty()) {
      throw CannotSmooth(t, "topic " + std::to_string(t) + " has no probabilities below " +
                                text::format_double(cutoff) + " to resample from");
    }
  }
  std::mt19937_64 rng(seed);
  GraphBuilder builder(graph.node_count(), d);
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    const NodeId u = graph.source(e);
    const NodeId v = graph.target(e);
    builder.add_edge(u, v);
    for (const auto& [topic, prob] : graph.topics(e)) {
      double q = prob;
      if (prob > cutoff) {
        std::uniform_int_distribution<std::size_t> pick(0, pool[topic].size() - 1);
        q = pool[topic][pick(rng)];
      }
      builder.add(u, v, topic, q);
    }
  }
  return std::move(builder).build();
}

struct ProbabilitySummary {
  double mean = 0.0;
  double stddev = 0.0;  // population
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
};

struct TopicStats {
  TopicId topic = 0;
  std::size_t nonzero = 0;
  std::optional<ProbabilitySummary> summary;  // absent for an all-zero topic
};

/// Percentile of sorted data by linear interpolation between order statistics
/// (position q * (n - 1)).
inline double percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidInput("percentile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

inline std::vector<TopicStats> probability_stats(const TopicGraph& graph) {
  std::vector<std::vector<double>> values(graph.topic_count());
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    for (const auto& [topic, prob] : graph.topics(e)) values[topic].push_back(prob);
  }
  std::vector<TopicStats> out;
  for (TopicId t = 0; t < graph.topic_count(); ++t) {
    auto& v = values[t];
    TopicStats s{t, v.size(), std::nullopt};
    if (!v.empty()) {
      std::sort(v.begin(), v.end());
      ProbabilitySummary sum;
      for (double x : v) sum.mean += x;
      sum.mean /= static_cast<double>(v.size());
      double var = 0.0;
      for (double x : v) var += (x - sum.mean) * (x - sum.mean);
      sum.stddev = std::sqrt(var / static_cast<double>(v.size()));
      sum.p25 = percentile(v, 0.25);
      sum.p50 = percentile(v, 0.50);
      sum.p75 = percentile(v, 0.75);
      s.summary = sum;
    }
    out.push_back(s);
  }
  return out;
}

/// CSV `topic,nonzero,mean,stddev,p25,p50,p75`; statistics are blank for an
/// all-zero topic.
inline void write_stats_csv(std::ostream& out, std::span<const TopicStats> stats) {
  out << "topic,nonzero,mean,stddev,p25,p50,p75\n";
  for (const auto& s : stats) {
    out << s.topic << ',' << s.nonzero;
    if (s.summary) {
      for (double x : {s.summary->mean, s.summary->stddev, s.summary->p25, s.summary->p50, s.summary->p75}) {
        out << ',' << text::format_double(x);
      }
    } else {
      out << ",,,,,";
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Optimum upper bounds

/// 1 / (1 - 1/e): the greedy approximation factor inverted.
inline double offline_bound(double greedy_spread) { return greedy_spread / (1.0 - std::exp(-1.0)); }

struct OnlineBound {
  double value = 0.0;              // minimum over candidates
  std::vector<double> candidates;  // [0] is the empty set, then each given set
};

namespace detail {

template <class Oracle>
double online_bound_for(Oracle& oracle, std::span<const NodeId> set, std::size_t k) {
  for (NodeId s : set) oracle.commit(s);
  std::vector<char> in_set(oracle.node_count(), 0);
  for (NodeId s : set) in_set[s] = 1;
  std::vector<double> gains;
  gains.reserve(oracle.node_count());
  auto scratch = oracle.make_scratch();
  for (NodeId v = 0; v < oracle.node_count(); ++v) {
    if (!in_set[v]) gains.push_back(oracle.marginal(v, scratch));
  }
  const std::size_t top = std::min(k, gains.size());
  std::partial_sort(gains.begin(), gains.begin() + static_cast<std::ptrdiff_t>(top), gains.end(), std::greater<>());
  double bound = oracle.spread();
  for (std::size_t i = 0; i < top; ++i) bound += gains[i];
  return bound;
}

}  // namespace detail

/// min over S in {empty} + candidates of sigma(S) + (sum of the k largest
/// MI(v | S) over v not in S). Each term upper-bounds the best k-seed spread.
inline OnlineBound online_bound(const TopicGraph& graph, const EdgeProbabilities& p,
                                std::span<const std::vector<NodeId>> candidates, std::size_t k,
                                const OracleConfig& oracle) {
  if (k == 0) throw InvalidInput("k must be at least 1");
  OnlineBound out;
  auto evaluate = [&](std::span<const NodeId> set) {
    if (set.size() > k) throw InvalidInput("online bound candidate set larger than k");
    detail::check_seeds(set, graph.node_count());
    if (oracle.is_exact()) {
      ExactMarginalOracle o(graph, p);
      return detail::online_bound_for(o, set, k);
    }
    SampledMarginalOracle o(graph, p, oracle.runs, oracle.seed);
    return detail::online_bound_for(o, set, k);
  };
  out.candidates.push_back(evaluate({}));
  for (const auto& c : candidates) out.candidates.push_back(evaluate(c));
  out.value = *std::min_element(out.candidates.begin(), out.candidates.end());
  return out;
}

// ---------------------------------------------------------------------------
// Mixture sampling

struct MixtureSampling {
  enum class Mode { uniform_pairs, dirichlet };

  Mode mode = Mode::uniform_pairs;
  std::vector<double> alpha;  // dirichlet: d values, or one value used for every topic

  static MixtureSampling uniform_pairs() { return {Mode::uniform_pairs, {}}; }
  static MixtureSampling dirichlet(std::vector<double> alpha) { return {Mode::dirichlet, std::move(alpha)}; }
};

/// uniform_pairs: a uniformly random unordered topic pair with a uniform
/// weight split. dirichlet: a Dirichlet(alpha) draw with weights below 0.01
/// eliminated and the rest renormalized.
inline std::vector<TopicMixture> sample_mixtures(const MixtureSampling& spec, std::size_t count, std::size_t d,
                                                 std::uint64_t seed) {
  if (count == 0) throw InvalidInput("mixture count must be at least 1");
  if (d == 0) throw InvalidInput("mixtures need at least one topic");
  std::mt19937_64 rng(seed);
  std::vector<TopicMixture> out;
  out.reserve(count);
  if (spec.mode == MixtureSampling::Mode::uniform_pairs) {
    if (d < 2) throw InvalidInput("two-topic mixtures need at least two topics");
    std::uniform_int_distribution<std::size_t> first(0, d - 1);
    std::uniform_int_distribution<std::size_t> second(0, d - 2);
    std::uniform_real_distribution<double> split(0.0, 1.0);
    while (out.size() < count) {
      const std::size_t i = first(rng);
      std::size_t j = second(rng);
      if (j >= i) ++j;
      const double w = split(rng);
      if (w <= 0.0) continue;
      std::vector<double> weights(d, 0.0);
      weights[i] = w;
      weights[j] = 1.0 - w;
      if (weights[j] <= 0.0) continue;
      out.emplace_back(std::move(weights));
    }
    return out;
  }

  std::vector<double> alpha = spec.alpha;
  if (alpha.size() == 1) alpha.assign(d, alpha.front());
  if (alpha.size() != d) throw InvalidInput("dirichlet needs one alpha per topic (or a single shared value)");
  for (double a : alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidInput("dirichlet alpha entries must be positive and finite");
  }
  std::vector<std::gamma_distribution<double>> gammas;
  for (double a : alpha) gammas.emplace_back(a, 1.0);
  std::vector<double> draw(d);
  while (out.size() < count) {
    double total = 0.0;
    for (std::size_t i = 0; i < d; ++i) total += draw[i] = gammas[i](rng);
    if (!(total > 0.0) || !std::isfinite(total)) continue;
    for (double& x : draw) x /= total;
    try {
      out.push_back(normalize_mixture(draw, 0.01));
    } catch (const DegenerateMixture&) {
    }
  }
  return out;
}

}  // namespace timax
