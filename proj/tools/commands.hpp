#pragma once

// Implementations behind the timax CLI verbs. Each takes a plain options struct
// and an output stream so the verbs can be driven from tests.

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "timax/timax.hpp"

namespace timax::cli {

inline std::vector<double> parse_weights(std::string_view csv) {
  std::vector<double> w;
  for (auto token : text::split(csv, ',')) {
    const auto x = text::parse_double(token);
    if (!x) throw InvalidInput("malformed number '" + std::string(token) + "'");
    w.push_back(*x);
  }
  return w;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  return out;
}

struct GenGraphOptions {
  GeneratorSpec spec;
  std::string output;
};

inline void cmd_gen_graph(const GenGraphOptions& o, std::ostream& log) {
  const auto graph = generate_graph(o.spec);
  save_graph(o.output, graph);
  log << "wrote " << o.output << ": " << graph.node_count() << " nodes, " << graph.edge_count() << " edges, "
      << graph.topic_count() << " topics, fingerprint " << graph_fingerprint(graph) << '\n';
}

struct PreprocessOptions {
  std::string graph;
  std::string output;
  std::size_t k = 50;
  std::string landmarks;  // comma-separated; empty means {0, 0.1, ..., 1}
  bool exact = false;
  std::size_t runs = 10000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

inline LandmarkSet landmarks_from(const std::string& csv) {
  return csv.empty() ? LandmarkSet::standard() : LandmarkSet::parse(csv);
}

inline void cmd_preprocess(const PreprocessOptions& o, std::ostream& log) {
  const auto graph = load_graph(o.graph);
  const auto oracle = o.exact ? OracleConfig::exact() : OracleConfig::monte_carlo(o.runs, o.seed);
  const auto start = std::chrono::steady_clock::now();
  const auto index = build_index(graph, o.k, landmarks_from(o.landmarks), oracle, o.workers);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_index(o.output, index);
  const auto mu = mu_max(index);
  log << "wrote " << o.output << ": " << index.entries().size() << " entries, k=" << index.k()
      << ", mu_max=" << text::format_double(mu.value) << " (raw " << text::format_double(mu.raw) << "), "
      << text::format_double(seconds) << " s\n";
}

struct QueryOptions {
  std::string index;
  std::string graph;   // optional; enables the stale-index check
  std::string labels;  // optional node label sidecar
  std::string mixture;
  std::string algorithm = "mis";
  std::size_t k = 0;   // 0 means the index's k
};

inline QueryResult cmd_query(const QueryOptions& o, std::ostream& out) {
  std::optional<TopicGraph> graph;
  if (!o.graph.empty()) graph = load_graph(o.graph);
  const auto index = load_index(o.index, graph ? &*graph : nullptr);
  const TopicMixture mixture(parse_weights(o.mixture));
  const NodeLabels labels = o.labels.empty() ? NodeLabels{} : NodeLabels::load(o.labels);
  const std::size_t k = o.k == 0 ? index.k() : o.k;
  const auto result = run_query(parse_query_algorithm(o.algorithm), index, mixture, k);

  out << "algorithm " << to_string(result.algorithm) << "\nrounded";
  for (double w : result.rounded) out << ' ' << text::format_double(w);
  out << '\n';
  if (result.topic) out << "topic " << *result.topic << '\n';
  if (result.fallback) out << "fallback round-up\n";
  if (result.shortfall) out << "shortfall " << result.seeds.size() << " of " << k << '\n';
  out << "latency_us " << text::format_double(std::chrono::duration<double, std::micro>(result.latency).count()) << '\n';
  out << "seeds";
  for (NodeId v : result.seeds) out << ' ' << labels.label(v);
  out << '\n';
  if (!result.scores.empty()) {
    out << "scores";
    for (double s : result.scores) out << ' ' << text::format_double(s);
    out << '\n';
  }
  return result;
}

struct EvaluateOptions {
  std::string graph;
  std::string index;  // required when mis or bts is requested
  std::vector<std::string> algorithms{"mis", "bts"};
  std::string mixture_mode = "uniform_pairs";
  std::string alpha;  // dirichlet parameters
  std::size_t mixtures = 50;
  std::string output_dir = ".";
  EvaluationOptions eval;
};

inline EvaluationReport cmd_evaluate(const EvaluateOptions& o, std::ostream& log) {
  for (const auto& a : o.algorithms) check_algorithm(a);
  const auto graph = load_graph(o.graph);
  std::optional<LandmarkIndex> index;
  if (!o.index.empty()) index = load_index(o.index, &graph);

  MixtureSampling sampling;
  if (o.mixture_mode == "uniform_pairs") {
    sampling = MixtureSampling::uniform_pairs();
  } else if (o.mixture_mode == "dirichlet") {
    if (o.alpha.empty()) throw InvalidInput("dirichlet sampling needs --alpha");
    sampling = MixtureSampling::dirichlet(parse_weights(o.alpha));
  } else {
    throw InvalidInput("unknown mixture mode '" + o.mixture_mode + "'");
  }
  const auto mixtures = sample_mixtures(sampling, o.mixtures, graph.topic_count(), derive_seed(o.eval.seed, 3));

  const auto report = evaluate_algorithms(graph, index ? &*index : nullptr, mixtures, o.algorithms, o.eval);

  const std::filesystem::path dir(o.output_dir);
  {
    auto out = open_output(dir / "spread.csv");
    write_spread_csv(out, report);
  }
  {
    auto out = open_output(dir / "timing.csv");
    write_timing_csv(out, report);
  }
  {
    auto out = open_output(dir / "mixtures.csv");
    out << "mixture";
    for (std::size_t t = 0; t < graph.topic_count(); ++t) out << ",lambda_" << t;
    out << '\n';
    for (std::size_t m = 0; m < mixtures.size(); ++m) {
      out << m;
      for (double w : mixtures[m].weights()) out << ',' << text::format_double(w);
      out << '\n';
    }
  }
  if (o.eval.bounds) {
    auto out = open_output(dir / "bounds.csv");
    write_bounds_csv(out, report);
  }
  log << "evaluated " << o.algorithms.size() << " algorithms on " << mixtures.size() << " mixtures; wrote "
      << (dir / "spread.csv").string() << '\n';
  return report;
}

struct AnalyzeOptions {
  std::string graph;
  std::vector<double> thetas{0.0};
  std::string output_dir = ".";
  std::string smooth_output;  // when set, also write a smoothed copy of the graph
  double smooth_cutoff = 0.99;
  std::uint64_t seed = 0;
};

inline void cmd_analyze(const AnalyzeOptions& o, std::ostream& log) {
  const auto graph = load_graph(o.graph);
  const std::filesystem::path dir(o.output_dir);
  auto summary = open_output(dir / "overlap_summary.csv");
  summary << "theta,coefficient,pairs,min,mean,max\n";
  for (double theta : o.thetas) {
    const auto report = overlap_coefficients(graph, theta);
    const std::string tag = text::format_double(theta);
    {
      auto out = open_output(dir / ("overlap_edge_theta=" + tag + ".csv"));
      write_overlap_csv(out, report, false);
    }
    {
      auto out = open_output(dir / ("overlap_node_theta=" + tag + ".csv"));
      write_overlap_csv(out, report, true);
    }
    for (const auto& [name, s] : {std::pair{"edge", report.edge_summary}, std::pair{"node", report.node_summary}}) {
      summary << tag << ',' << name << ',' << s.pairs << ',';
      if (s.pairs > 0) {
        summary << text::format_double(s.min) << ',' << text::format_double(s.mean) << ',' << text::format_double(s.max);
      } else {
        summary << ",,";
      }
      summary << '\n';
    }
  }
  {
    auto out = open_output(dir / "stats.csv");
    write_stats_csv(out, probability_stats(graph));
  }
  if (!o.smooth_output.empty()) {
    save_graph(o.smooth_output, smooth_probabilities(graph, o.smooth_cutoff, o.seed));
    log << "wrote smoothed graph " << o.smooth_output << '\n';
  }
  log << "wrote overlap reports for " << o.thetas.size() << " thresholds to " << dir.string() << '\n';
}

inline void cmd_stats(const std::string& graph_path, std::ostream& out) {
  write_stats_csv(out, probability_stats(load_graph(graph_path)));
}

}  // namespace timax::cli
