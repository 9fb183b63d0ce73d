#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "timax/analysis.hpp"
#include "timax/diffusion.hpp"
#include "timax/error.hpp"
#include "timax/graph.hpp"
#include "timax/preprocess.hpp"
#include "timax/query.hpp"
#include "timax/rng.hpp"
#include "timax/selection.hpp"
#include "timax/text.hpp"

namespace timax {

// Names accepted by evaluate: the two index-backed online algorithms, greedy on
// the query's own mixture, and the baselines.
inline const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names = {"mis",        "bts",    "ta_greedy",          "to_greedy",
                                                 "to_degree",  "random", "ta_weighted_degree", "ta_pagerank"};
  return names;
}

inline bool is_index_algorithm(std::string_view name) { return name == "mis" || name == "bts"; }

inline void check_algorithm(std::string_view name) {
  const auto& names = known_algorithms();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw InvalidInput("unknown algorithm '" + std::string(name) + "'");
  }
}

struct EvaluationOptions {
  std::size_t k = 50;
  std::size_t runs = 10000;         // spread measurement
  std::size_t greedy_runs = 10000;  // selection oracle for ta_greedy / to_greedy
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::size_t repeats = 1000;       // timed repetitions per mixture for mis / bts
  bool bounds = false;
};

struct AlgorithmReport {
  std::string name;
  std::vector<double> mean_spread;          // index j: prefix of j+1 seeds, averaged over mixtures
  std::vector<double> mean_standard_error;
  std::vector<std::vector<NodeId>> seeds;   // per mixture
  std::vector<double> latencies_us;         // per timed invocation
  std::uint64_t oracle_calls = 0;           // during selection only
};

struct BoundReport {
  std::size_t mixture = 0;
  double greedy_spread = 0.0;
  double offline = 0.0;
  double online = 0.0;
};

struct EvaluationReport {
  std::vector<AlgorithmReport> algorithms;
  std::vector<BoundReport> bounds;
};

/// Seeds chosen by one named algorithm for one mixture.
inline std::vector<NodeId> run_algorithm(const std::string& name, const TopicGraph& graph, const LandmarkIndex* index,
                                         const TopicMixture& mixture, std::size_t mixture_index,
                                         const EvaluationOptions& options) {
  const auto greedy_oracle = OracleConfig::monte_carlo(options.greedy_runs, derive_seed(options.seed, 1));
  if (name == "mis" || name == "bts") {
    if (!index) throw InvalidInput(name + " needs a landmark index");
    return run_query(parse_query_algorithm(name), *index, mixture, options.k).seeds;
  }
  if (name == "ta_greedy") {
    return greedy_select(graph, mix_probabilities(graph, mixture), options.k, greedy_oracle, options.workers).nodes();
  }
  BaselineOptions b;
  b.mixture = mixture;
  b.seed = derive_seed(options.seed, 1000 + mixture_index);
  b.oracle = greedy_oracle;
  b.workers = options.workers;
  return select_baseline(graph, parse_baseline(name), options.k, b);
}

/// Run every algorithm on every mixture and measure the spread of each seed
/// prefix on the mixed probabilities. Every algorithm is measured on the same
/// Monte Carlo runs, so comparisons are paired.
inline EvaluationReport evaluate_algorithms(const TopicGraph& graph, const LandmarkIndex* index,
                                            std::span<const TopicMixture> mixtures,
                                            const std::vector<std::string>& algorithms,
                                            const EvaluationOptions& options) {
  if (options.k == 0 || options.runs == 0 || options.greedy_runs == 0) throw InvalidInput("k and runs must be positive");
  if (mixtures.empty()) throw InvalidInput("evaluation needs at least one mixture");
  for (const auto& a : algorithms) {
    check_algorithm(a);
    if (is_index_algorithm(a)) {
      if (!index) throw InvalidInput(a + " needs a landmark index");
      index->check_graph(graph);
      if (index->k() < options.k) throw InvalidInput("index k is smaller than the evaluation k");
    }
  }
  const std::uint64_t measure_seed = derive_seed(options.seed, 2);
  EvaluationReport report;
  for (const auto& name : algorithms) {
    AlgorithmReport r;
    r.name = name;
    r.mean_spread.assign(options.k, 0.0);
    r.mean_standard_error.assign(options.k, 0.0);
    for (std::size_t m = 0; m < mixtures.size(); ++m) {
      const auto& mixture = mixtures[m];
      const std::uint64_t calls_before = oracle_call_count();
      std::vector<NodeId> seeds;
      if (is_index_algorithm(name)) {
        const auto algorithm = parse_query_algorithm(name);
        const std::size_t repeats = std::max<std::size_t>(1, options.repeats);
        for (std::size_t rep = 0; rep < repeats; ++rep) {
          auto q = run_query(algorithm, *index, mixture, options.k);
          r.latencies_us.push_back(std::chrono::duration<double, std::micro>(q.latency).count());
          if (rep == 0) seeds = std::move(q.seeds);
        }
      } else {
        const auto start = std::chrono::steady_clock::now();
        seeds = run_algorithm(name, graph, index, mixture, m, options);
        r.latencies_us.push_back(
            std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count());
      }
      r.oracle_calls += oracle_call_count() - calls_before;

      const auto p = mix_probabilities(graph, mixture);
      const auto prefixes = prefix_spreads(graph, p, seeds, options.runs, measure_seed, options.workers);
      for (std::size_t j = 0; j < options.k; ++j) {
        // A short seed list keeps its full-set spread for the larger budgets.
        const SpreadEstimate est = prefixes.empty() ? SpreadEstimate{} : prefixes[std::min(j, prefixes.size() - 1)];
        r.mean_spread[j] += est.mean / static_cast<double>(mixtures.size());
        r.mean_standard_error[j] += est.standard_error / static_cast<double>(mixtures.size());
      }
      r.seeds.push_back(std::move(seeds));
    }
    report.algorithms.push_back(std::move(r));
  }

  if (options.bounds) {
    const AlgorithmReport* greedy = nullptr;
    for (const auto& r : report.algorithms) {
      if (r.name == "ta_greedy") greedy = &r;
    }
    if (!greedy) throw InvalidInput("bounds need ta_greedy among the algorithms");
    const auto oracle = OracleConfig::monte_carlo(options.runs, measure_seed);
    for (std::size_t m = 0; m < mixtures.size(); ++m) {
      const auto p = mix_probabilities(graph, mixtures[m]);
      std::vector<std::vector<NodeId>> candidates;
      for (const auto& r : report.algorithms) candidates.push_back(r.seeds[m]);
      const double greedy_spread = simulate_spread(graph, p, greedy->seeds[m], options.runs, measure_seed, options.workers).mean;
      report.bounds.push_back(
          {m, greedy_spread, offline_bound(greedy_spread), online_bound(graph, p, candidates, options.k, oracle).value});
    }
  }
  return report;
}

/// `algorithm,k,mean_spread,mean_standard_error`: one row per algorithm and
/// seed budget 1..k.
inline void write_spread_csv(std::ostream& out, const EvaluationReport& report) {
  out << "algorithm,k,mean_spread,mean_standard_error\n";
  for (const auto& r : report.algorithms) {
    for (std::size_t j = 0; j < r.mean_spread.size(); ++j) {
      out << r.name << ',' << j + 1 << ',' << text::format_double(r.mean_spread[j]) << ','
          << text::format_double(r.mean_standard_error[j]) << '\n';
    }
  }
}

/// `algorithm,invocations,median_us,p99_us,mean_us,oracle_calls`.
inline void write_timing_csv(std::ostream& out, const EvaluationReport& report) {
  out << "algorithm,invocations,median_us,p99_us,mean_us,oracle_calls\n";
  for (const auto& r : report.algorithms) {
    auto sorted = r.latencies_us;
    std::sort(sorted.begin(), sorted.end());
    double mean = 0.0;
    for (double x : sorted) mean += x / static_cast<double>(sorted.size());
    out << r.name << ',' << sorted.size() << ',' << text::format_double(percentile(sorted, 0.5)) << ','
        << text::format_double(percentile(sorted, 0.99)) << ',' << text::format_double(mean) << ','
        << r.oracle_calls << '\n';
  }
}

/// `mixture,greedy_spread,offline_bound,online_bound`.
inline void write_bounds_csv(std::ostream& out, const EvaluationReport& report) {
  out << "mixture,greedy_spread,offline_bound,online_bound\n";
  for (const auto& b : report.bounds) {
    out << b.mixture << ',' << text::format_double(b.greedy_spread) << ',' << text::format_double(b.offline) << ','
        << text::format_double(b.online) << '\n';
  }
}

}  // namespace timax
