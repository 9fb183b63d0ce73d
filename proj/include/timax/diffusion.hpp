#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "timax/error.hpp"
#include "timax/graph.hpp"
#include "timax/parallel.hpp"
#include "timax/rng.hpp"
#include "timax/text.hpp"

namespace timax {

// Number of spread/marginal evaluations performed process-wide. Online query
// paths are required to leave it untouched.
inline std::atomic<std::uint64_t> g_oracle_calls{0};

inline std::uint64_t oracle_call_count() noexcept { return g_oracle_calls.load(std::memory_order_relaxed); }

namespace detail {
inline void count_oracle_call() noexcept { g_oracle_calls.fetch_add(1, std::memory_order_relaxed); }
}  // namespace detail

struct SpreadEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t runs = 0;
};

/// How influence spread is evaluated: exact live-edge enumeration (small graphs
/// only) or Monte Carlo with a fixed run count and master seed.
struct OracleConfig {
  enum class Kind { exact, monte_carlo };

  Kind kind = Kind::monte_carlo;
  std::size_t runs = 10000;
  std::uint64_t seed = 0;

  static OracleConfig exact() { return {Kind::exact, 0, 0}; }
  static OracleConfig monte_carlo(std::size_t runs, std::uint64_t seed) {
    if (runs == 0) throw InvalidInput("Monte Carlo oracle needs at least one run");
    return {Kind::monte_carlo, runs, seed};
  }

  bool is_exact() const noexcept { return kind == Kind::exact; }

  /// "exact" or "mc:runs=<R>:seed=<S>".
  std::string describe() const {
    if (is_exact()) return "exact";
    return "mc:runs=" + std::to_string(runs) + ":seed=" + std::to_string(seed);
  }

  static OracleConfig parse(std::string_view desc) {
    if (desc == "exact") return exact();
    const auto parts = text::split(desc, ':');
    if (parts.size() == 3 && parts[0] == "mc") {
      const auto runs_field = text::field(parts[1], "runs");
      const auto seed_field = text::field(parts[2], "seed");
      if (runs_field && seed_field) {
        const auto runs = text::parse_uint(*runs_field);
        const auto seed = text::parse_uint(*seed_field);
        if (runs && seed && *runs > 0) return monte_carlo(*runs, *seed);
      }
    }
    throw InvalidInput("unrecognized oracle description '" + std::string(desc) + "'");
  }

  friend bool operator==(const OracleConfig&, const OracleConfig&) = default;
};

/// Positive-probability edges of a graph under one probability function, in
/// CSR form. Original edge ids are kept so coin flips stay keyed to the edge
/// regardless of which probability function is in use.
class DiffusionGraph {
 public:
  DiffusionGraph(const TopicGraph& graph, const EdgeProbabilities& p) : node_count_(graph.node_count()) {
    if (p.size() != graph.edge_count()) {
      throw InvalidInput("probability function covers " + std::to_string(p.size()) + " edges, graph has " +
                         std::to_string(graph.edge_count()));
    }
    offsets_.assign(node_count_ + 1, 0);
    for (NodeId u = 0; u < node_count_; ++u) {
      for (EdgeId e = graph.edges_begin(u); e < graph.edges_end(u); ++e) {
        const double q = p[e];
        if (!(q >= 0.0 && q <= 1.0)) throw InvalidInput("edge probability outside [0,1]");
        if (q > 0.0) arcs_.push_back({graph.target(e), e, q});
      }
      offsets_[u + 1] = static_cast<std::uint32_t>(arcs_.size());
    }
  }

  struct Arc {
    NodeId target;
    EdgeId edge;
    double probability;
  };

  std::size_t node_count() const noexcept { return node_count_; }
  std::span<const Arc> arcs(NodeId u) const noexcept {
    return {arcs_.data() + offsets_[u], arcs_.data() + offsets_[u + 1]};
  }
  bool has_arcs(NodeId u) const noexcept { return offsets_[u] != offsets_[u + 1]; }

 private:
  std::size_t node_count_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Arc> arcs_;
};

namespace detail {

inline void check_seeds(std::span<const NodeId> seeds, std::size_t node_count) {
  for (NodeId s : seeds) {
    if (s >= node_count) throw InvalidInput("seed node " + std::to_string(s) + " out of range");
  }
}

// BFS state reused across traversals; `stamp` avoids clearing between runs.
struct Traversal {
  std::vector<std::uint32_t> mark;
  std::vector<NodeId> queue;
  std::uint32_t stamp = 0;

  explicit Traversal(std::size_t n) : mark(n, 0) { queue.reserve(n); }

  std::uint32_t fresh_stamp() {
    if (++stamp == 0) {
      std::fill(mark.begin(), mark.end(), 0);
      stamp = 1;
    }
    return stamp;
  }
};

// Expand from whatever is already queued, flipping each arc's coin the first
// time its source is expanded. `blocked(v)` nodes are never entered.
template <class Blocked>
std::size_t expand(const DiffusionGraph& dg, std::uint64_t key, Traversal& t, std::uint32_t stamp,
                   std::size_t head, Blocked&& blocked) {
  std::size_t added = 0;
  while (head < t.queue.size()) {
    const NodeId u = t.queue[head++];
    for (const auto& arc : dg.arcs(u)) {
      if (t.mark[arc.target] == stamp || blocked(arc.target)) continue;
      if (arc.probability >= 1.0 || edge_coin(key, arc.edge) < arc.probability) {
        t.mark[arc.target] = stamp;
        t.queue.push_back(arc.target);
        ++added;
      }
    }
  }
  return added;
}

inline std::size_t reachable_count(const DiffusionGraph& dg, std::span<const NodeId> seeds, std::uint64_t key,
                                   Traversal& t) {
  const std::uint32_t stamp = t.fresh_stamp();
  t.queue.clear();
  std::size_t count = 0;
  for (NodeId s : seeds) {
    if (t.mark[s] == stamp) continue;
    t.mark[s] = stamp;
    t.queue.push_back(s);
    ++count;
  }
  return count + expand(dg, key, t, stamp, 0, [](NodeId) { return false; });
}

inline SpreadEstimate summarize(double sum, double sum_sq, std::size_t runs) {
  SpreadEstimate est;
  est.runs = runs;
  est.mean = sum / static_cast<double>(runs);
  if (runs > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / static_cast<double>(runs)) / static_cast<double>(runs - 1));
    est.standard_error = std::sqrt(var / static_cast<double>(runs));
  }
  return est;
}

}  // namespace detail

struct LiveEdgeSample {
  std::vector<EdgeId> live;
};

/// Materialize the live-edge graph of one run: every edge whose coin falls
/// below its probability.
inline LiveEdgeSample live_edge_sample(const TopicGraph& graph, const EdgeProbabilities& p, std::uint64_t seed,
                                       std::size_t run) {
  if (p.size() != graph.edge_count()) throw InvalidInput("probability function does not match graph");
  const std::uint64_t key = run_key(seed, run);
  LiveEdgeSample sample;
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    if (p[e] >= 1.0 || (p[e] > 0.0 && edge_coin(key, e) < p[e])) sample.live.push_back(e);
  }
  return sample;
}

/// Per-run reachable-set sizes for runs [0, runs). Run r only depends on
/// (seed, r), so the result does not depend on `workers`.
inline std::vector<std::uint32_t> simulate_runs(const TopicGraph& graph, const EdgeProbabilities& p,
                                                std::span<const NodeId> seeds, std::size_t runs, std::uint64_t seed,
                                                std::size_t workers = 1) {
  detail::check_seeds(seeds, graph.node_count());
  if (runs == 0) throw InvalidInput("runs must be positive");
  detail::count_oracle_call();
  std::vector<std::uint32_t> counts(runs, 0);
  if (seeds.empty()) return counts;
  const DiffusionGraph dg(graph, p);
  const std::size_t chunks = std::max<std::size_t>(1, std::min(workers, runs));
  parallel_for(chunks, workers, [&](std::size_t c) {
    detail::Traversal t(graph.node_count());
    for (std::size_t r = c * runs / chunks; r < (c + 1) * runs / chunks; ++r) {
      counts[r] = static_cast<std::uint32_t>(detail::reachable_count(dg, seeds, run_key(seed, r), t));
    }
  });
  return counts;
}

/// Monte Carlo estimate of sigma(S, p) under the independent cascade model.
inline SpreadEstimate simulate_spread(const TopicGraph& graph, const EdgeProbabilities& p,
                                      std::span<const NodeId> seeds, std::size_t runs, std::uint64_t seed,
                                      std::size_t workers = 1) {
  const auto counts = simulate_runs(graph, p, seeds, runs, seed, workers);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint32_t c : counts) {
    sum += c;
    sum_sq += static_cast<double>(c) * c;
  }
  return detail::summarize(sum, sum_sq, runs);
}

/// Spread of every prefix of an ordered seed list, all prefixes evaluated on
/// the same runs. Element j is the estimate for the first j+1 seeds.
inline std::vector<SpreadEstimate> prefix_spreads(const TopicGraph& graph, const EdgeProbabilities& p,
                                                  std::span<const NodeId> ordered_seeds, std::size_t runs,
                                                  std::uint64_t seed, std::size_t workers = 1) {
  detail::check_seeds(ordered_seeds, graph.node_count());
  if (runs == 0) throw InvalidInput("runs must be positive");
  detail::count_oracle_call();
  const std::size_t k = ordered_seeds.size();
  if (k == 0) return {};
  const DiffusionGraph dg(graph, p);
  const std::size_t chunks = std::max<std::size_t>(1, std::min(workers, runs));
  // Integer partial sums make the reduction independent of chunking.
  std::vector<std::vector<std::uint64_t>> sums(chunks, std::vector<std::uint64_t>(k, 0));
  std::vector<std::vector<std::uint64_t>> sums_sq(chunks, std::vector<std::uint64_t>(k, 0));
  parallel_for(chunks, workers, [&](std::size_t c) {
    detail::Traversal t(graph.node_count());
    for (std::size_t r = c * runs / chunks; r < (c + 1) * runs / chunks; ++r) {
      const std::uint64_t key = run_key(seed, r);
      const std::uint32_t stamp = t.fresh_stamp();
      t.queue.clear();
      std::uint64_t count = 0;
      for (std::size_t j = 0; j < k; ++j) {
        const NodeId s = ordered_seeds[j];
        if (t.mark[s] != stamp) {
          t.mark[s] = stamp;
          const std::size_t head = t.queue.size();
          t.queue.push_back(s);
          count += 1 + detail::expand(dg, key, t, stamp, head, [](NodeId) { return false; });
        }
        sums[c][j] += count;
        sums_sq[c][j] += count * count;
      }
    }
  });
  std::vector<SpreadEstimate> out(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::uint64_t s = 0;
    std::uint64_t sq = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
      s += sums[c][j];
      sq += sums_sq[c][j];
    }
    out[j] = detail::summarize(static_cast<double>(s), static_cast<double>(sq), runs);
  }
  return out;
}

/// Largest number of uncertain edges exact_spread will branch on.
inline constexpr std::size_t kExactFreeEdgeLimit = 25;

namespace detail {

struct ExactState {
  std::vector<char> active;
  std::vector<const DiffusionGraph::Arc*> pending;
  std::size_t count = 0;

  void activate(const DiffusionGraph& dg, NodeId v) {
    active[v] = 1;
    ++count;
    for (const auto& arc : dg.arcs(v)) pending.push_back(&arc);
  }
};

// Branches only on coins that can still change the outcome (arcs from an
// active node into an inactive one); all other coins marginalize out.
inline double explore(const DiffusionGraph& dg, ExactState state) {
  while (!state.pending.empty()) {
    const auto* arc = state.pending.back();
    state.pending.pop_back();
    if (state.active[arc->target]) continue;
    if (arc->probability >= 1.0) {
      state.activate(dg, arc->target);
      continue;
    }
    ExactState live = state;
    live.activate(dg, arc->target);
    const double q = arc->probability;
    return q * explore(dg, std::move(live)) + (1.0 - q) * explore(dg, std::move(state));
  }
  return static_cast<double>(state.count);
}

inline std::size_t free_edges_reachable(const DiffusionGraph& dg, std::span<const NodeId> seeds) {
  std::vector<char> seen(dg.node_count(), 0);
  std::vector<NodeId> stack;
  for (NodeId s : seeds) {
    if (!seen[s]) {
      seen[s] = 1;
      stack.push_back(s);
    }
  }
  std::size_t free = 0;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (const auto& arc : dg.arcs(u)) {
      if (arc.probability < 1.0) ++free;
      if (!seen[arc.target]) {
        seen[arc.target] = 1;
        stack.push_back(arc.target);
      }
    }
  }
  return free;
}

inline double exact_spread(const DiffusionGraph& dg, std::span<const NodeId> seeds) {
  const std::size_t free = free_edges_reachable(dg, seeds);
  if (free > kExactFreeEdgeLimit) {
    throw CapacityError("exact spread would enumerate " + std::to_string(free) + " uncertain edges (limit " +
                        std::to_string(kExactFreeEdgeLimit) + ")");
  }
  ExactState state;
  state.active.assign(dg.node_count(), 0);
  for (NodeId s : seeds) {
    if (!state.active[s]) state.activate(dg, s);
  }
  return explore(dg, std::move(state));
}

}  // namespace detail

/// Exact sigma(S, p): the expectation of |reachable(S)| over all live-edge
/// graphs. Edges with p = 0 or p = 1 are fixed; the uncertain edges reachable
/// from S must number at most kExactFreeEdgeLimit.
inline double exact_spread(const TopicGraph& graph, const EdgeProbabilities& p, std::span<const NodeId> seeds) {
  detail::check_seeds(seeds, graph.node_count());
  detail::count_oracle_call();
  if (seeds.empty()) return 0.0;
  return detail::exact_spread(DiffusionGraph(graph, p), seeds);
}

/// Incremental marginal-gain oracle on exact spreads.
class ExactMarginalOracle {
 public:
  struct Scratch {};

  ExactMarginalOracle(const TopicGraph& graph, const EdgeProbabilities& p)
      : dg_(graph, p), in_set_(graph.node_count(), 0) {}

  std::size_t node_count() const noexcept { return dg_.node_count(); }
  Scratch make_scratch() const { return {}; }

  double marginal(NodeId v, Scratch&) const {
    detail::count_oracle_call();
    if (in_set_[v]) return 0.0;
    std::vector<NodeId> with(selected_);
    with.push_back(v);
    return detail::exact_spread(dg_, with) - spread_;
  }
  double marginal(NodeId v) const {
    Scratch s;
    return marginal(v, s);
  }

  /// Add v to the current set and return its realized gain.
  double commit(NodeId v) {
    detail::count_oracle_call();
    if (in_set_[v]) return 0.0;
    selected_.push_back(v);
    in_set_[v] = 1;
    const double before = spread_;
    spread_ = detail::exact_spread(dg_, selected_);
    return spread_ - before;
  }

  double spread() const noexcept { return spread_; }
  std::optional<double> standard_error() const noexcept { return std::nullopt; }

 private:
  DiffusionGraph dg_;
  std::vector<NodeId> selected_;
  std::vector<char> in_set_;
  double spread_ = 0.0;
};

/// Incremental marginal-gain oracle on a fixed set of Monte Carlo runs. The
/// reached set of the current seeds is stored per run, so MI(v | S) for a
/// candidate is a traversal from v that stops at already-reached nodes, and
/// every candidate is scored on the same coins (common random numbers). The
/// averaged objective is a coverage function, hence exactly submodular, so
/// lazy greedy over it is equivalent to naive greedy over it.
class SampledMarginalOracle {
 public:
  using Scratch = detail::Traversal;

  SampledMarginalOracle(const TopicGraph& graph, const EdgeProbabilities& p, std::size_t runs, std::uint64_t seed)
      : dg_(graph, p),
        n_(graph.node_count()),
        runs_(runs),
        reached_(runs * graph.node_count(), 0),
        reached_count_(graph.node_count(), 0),
        run_sizes_(runs, 0),
        scratch_(graph.node_count()) {
    if (runs == 0) throw InvalidInput("runs must be positive");
    keys_.reserve(runs);
    for (std::size_t r = 0; r < runs; ++r) keys_.push_back(run_key(seed, r));
  }

  std::size_t node_count() const noexcept { return n_; }
  std::size_t runs() const noexcept { return runs_; }
  Scratch make_scratch() const { return Scratch(n_); }

  double marginal(NodeId v, Scratch& t) const {
    detail::count_oracle_call();
    // A node with no outgoing influence only ever adds itself.
    if (!dg_.has_arcs(v)) {
      return static_cast<double>(runs_ - reached_count_[v]) / static_cast<double>(runs_);
    }
    std::uint64_t gained = 0;
    for (std::size_t r = 0; r < runs_; ++r) {
      const std::uint8_t* reached = reached_.data() + r * n_;
      if (reached[v]) continue;
      const std::uint32_t stamp = t.fresh_stamp();
      t.queue.clear();
      t.mark[v] = stamp;
      t.queue.push_back(v);
      gained += 1 + detail::expand(dg_, keys_[r], t, stamp, 0, [reached](NodeId w) { return reached[w] != 0; });
    }
    return static_cast<double>(gained) / static_cast<double>(runs_);
  }
  double marginal(NodeId v) const { return marginal(v, scratch_); }

  double commit(NodeId v) {
    detail::count_oracle_call();
    std::uint64_t gained = 0;
    auto& t = scratch_;
    for (std::size_t r = 0; r < runs_; ++r) {
      std::uint8_t* reached = reached_.data() + r * n_;
      if (reached[v]) continue;
      t.queue.clear();
      reached[v] = 1;
      t.queue.push_back(v);
      // The reached bitmap itself serves as the visited set.
      std::size_t head = 0;
      while (head < t.queue.size()) {
        const NodeId u = t.queue[head++];
        for (const auto& arc : dg_.arcs(u)) {
          if (reached[arc.target]) continue;
          if (arc.probability >= 1.0 || edge_coin(keys_[r], arc.edge) < arc.probability) {
            reached[arc.target] = 1;
            t.queue.push_back(arc.target);
          }
        }
      }
      for (NodeId w : t.queue) ++reached_count_[w];
      run_sizes_[r] += static_cast<std::uint32_t>(t.queue.size());
      gained += t.queue.size();
    }
    total_ += gained;
    return static_cast<double>(gained) / static_cast<double>(runs_);
  }

  double spread() const noexcept { return static_cast<double>(total_) / static_cast<double>(runs_); }

  std::optional<double> standard_error() const {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint32_t c : run_sizes_) {
      sum += c;
      sum_sq += static_cast<double>(c) * c;
    }
    return detail::summarize(sum, sum_sq, runs_).standard_error;
  }

 private:
  DiffusionGraph dg_;
  std::size_t n_;
  std::size_t runs_;
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint8_t> reached_;
  std::vector<std::uint32_t> reached_count_;
  std::vector<std::uint32_t> run_sizes_;
  std::uint64_t total_ = 0;
  mutable Scratch scratch_;
};

/// MI(v | S, p) = sigma(S + v, p) - sigma(S, p). The Monte Carlo mode scores
/// both sets on the same runs.
inline double marginal_influence(const TopicGraph& graph, const EdgeProbabilities& p, std::span<const NodeId> base,
                                 NodeId v, const OracleConfig& oracle) {
  detail::check_seeds(base, graph.node_count());
  if (v >= graph.node_count()) throw InvalidInput("node " + std::to_string(v) + " out of range");
  for (NodeId s : base) {
    if (s == v) return 0.0;
  }
  if (oracle.is_exact()) {
    detail::count_oracle_call();
    const DiffusionGraph dg(graph, p);
    std::vector<NodeId> with(base.begin(), base.end());
    with.push_back(v);
    const double before = base.empty() ? 0.0 : detail::exact_spread(dg, base);
    return detail::exact_spread(dg, with) - before;
  }
  SampledMarginalOracle sampled(graph, p, oracle.runs, oracle.seed);
  for (NodeId s : base) sampled.commit(s);
  return sampled.marginal(v);
}

}  // namespace timax
