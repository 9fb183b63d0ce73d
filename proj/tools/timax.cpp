#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

// Exit codes beyond CLI11's own parse errors.
constexpr int kInvalidInput = 2;
constexpr int kStaleIndex = 3;
constexpr int kFailure = 1;

}  // namespace

int main(int argc, char** argv) {
  using namespace timax;
  CLI::App app{"Topic-aware influence maximization with landmark preprocessing"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::size_t workers = 1;

  cli::GenGraphOptions gen;
  std::string model = "trivalency";
  auto* gen_cmd = app.add_subcommand("gen-graph", "Generate a synthetic topic graph");
  gen_cmd->add_option("--nodes", gen.spec.nodes, "Node count")->required();
  gen_cmd->add_option("--edges", gen.spec.edges, "Distinct directed edge count")->required();
  gen_cmd->add_option("--topics", gen.spec.topics, "Topic count")->required();
  gen_cmd->add_option("--model", model, "trivalency | random_uniform")->capture_default_str();
  gen_cmd->add_option("--overlap", gen.spec.overlap, "Fraction of nodes shared by all topics (0 = fully separable)")
      ->capture_default_str();
  gen_cmd->add_option("--max-prob", gen.spec.max_probability, "Upper bound for random_uniform")->capture_default_str();
  gen_cmd->add_option("--skew", gen.spec.degree_skew, "Pareto shape of source weights")->capture_default_str();
  gen_cmd->add_option("--seed", seed, "RNG seed")->capture_default_str();
  gen_cmd->add_option("-o,--output", gen.output, "Graph file to write")->required();

  cli::PreprocessOptions pre;
  auto* pre_cmd = app.add_subcommand("preprocess", "Build a landmark index");
  pre_cmd->add_option("--graph", pre.graph, "Graph file")->required();
  pre_cmd->add_option("--k", pre.k, "Seeds per entry")->capture_default_str();
  pre_cmd->add_option("--landmarks", pre.landmarks, "Comma-separated landmarks (default 0,0.1,...,1)");
  pre_cmd->add_flag("--exact", pre.exact, "Exact spread oracle (small graphs only)");
  pre_cmd->add_option("--runs", pre.runs, "Monte Carlo runs per estimate")->capture_default_str();
  pre_cmd->add_option("--seed", seed, "Master seed for the Monte Carlo oracle")->capture_default_str();
  pre_cmd->add_option("--workers", workers, "Worker threads")->capture_default_str();
  pre_cmd->add_option("-o,--output", pre.output, "Index file to write")->required();

  cli::QueryOptions query;
  auto* query_cmd = app.add_subcommand("query", "Answer one topic-mixture query from an index");
  query_cmd->add_option("--index", query.index, "Index file")->required();
  query_cmd->add_option("--graph", query.graph, "Graph file to check the index against");
  query_cmd->add_option("--labels", query.labels, "Node label sidecar");
  query_cmd->add_option("--mixture", query.mixture, "Comma-separated topic weights")->required();
  query_cmd->add_option("--algorithm", query.algorithm, "mis | bts")->capture_default_str();
  query_cmd->add_option("--k", query.k, "Seed count (default: index k)");

  cli::EvaluateOptions eval;
  std::string algorithms = "mis,bts";
  auto* eval_cmd = app.add_subcommand("evaluate", "Compare algorithms on sampled mixtures");
  eval_cmd->add_option("--graph", eval.graph, "Graph file")->required();
  eval_cmd->add_option("--index", eval.index, "Index file (needed for mis and bts)");
  eval_cmd->add_option("--algorithms", algorithms, "Comma-separated algorithm names")->capture_default_str();
  eval_cmd->add_option("--k", eval.eval.k, "Seed budget")->capture_default_str();
  eval_cmd->add_option("--mixtures", eval.mixtures, "Number of sampled mixtures")->capture_default_str();
  eval_cmd->add_option("--mixture-mode", eval.mixture_mode, "uniform_pairs | dirichlet")->capture_default_str();
  eval_cmd->add_option("--alpha", eval.alpha, "Dirichlet parameters (one value or one per topic)");
  eval_cmd->add_option("--runs", eval.eval.runs, "Monte Carlo runs for spread measurement")->capture_default_str();
  eval_cmd->add_option("--greedy-runs", eval.eval.greedy_runs, "Monte Carlo runs for greedy selection")
      ->capture_default_str();
  eval_cmd->add_option("--repeats", eval.eval.repeats, "Timed repetitions per mixture for mis and bts")
      ->capture_default_str();
  eval_cmd->add_flag("--bounds", eval.eval.bounds, "Also compute offline and online optimum bounds");
  eval_cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
  eval_cmd->add_option("--workers", workers, "Worker threads")->capture_default_str();
  eval_cmd->add_option("-o,--output-dir", eval.output_dir, "Directory for CSV output")->capture_default_str();

  cli::AnalyzeOptions analyze;
  std::string thetas = "0";
  auto* analyze_cmd = app.add_subcommand("analyze", "Topic overlap reports and probability statistics");
  analyze_cmd->add_option("--graph", analyze.graph, "Graph file")->required();
  analyze_cmd->add_option("--theta", thetas, "Comma-separated overlap thresholds")->capture_default_str();
  analyze_cmd->add_option("--smooth-output", analyze.smooth_output, "Write a smoothed copy of the graph here");
  analyze_cmd->add_option("--smooth-cutoff", analyze.smooth_cutoff, "Resample probabilities above this")
      ->capture_default_str();
  analyze_cmd->add_option("--seed", seed, "RNG seed for smoothing")->capture_default_str();
  analyze_cmd->add_option("-o,--output-dir", analyze.output_dir, "Directory for CSV output")->capture_default_str();

  std::string stats_graph;
  auto* stats_cmd = app.add_subcommand("stats", "Per-topic influence probability statistics (CSV on stdout)");
  stats_cmd->add_option("--graph", stats_graph, "Graph file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) {
      gen.spec.model = parse_probability_model(model);
      gen.spec.seed = seed;
      cli::cmd_gen_graph(gen, std::cerr);
    } else if (*pre_cmd) {
      pre.seed = seed;
      pre.workers = workers;
      cli::cmd_preprocess(pre, std::cerr);
    } else if (*query_cmd) {
      cli::cmd_query(query, std::cout);
    } else if (*eval_cmd) {
      eval.algorithms.clear();
      for (auto name : text::split(algorithms, ',')) eval.algorithms.emplace_back(name);
      eval.eval.seed = seed;
      eval.eval.workers = workers;
      cli::cmd_evaluate(eval, std::cerr);
    } else if (*analyze_cmd) {
      analyze.thetas = cli::parse_weights(thetas);
      analyze.seed = seed;
      cli::cmd_analyze(analyze, std::cerr);
    } else if (*stats_cmd) {
      cli::cmd_stats(stats_graph, std::cout);
    }
  } catch (const StaleIndex& e) {
    std::cerr << "stale index: " << e.what() << '\n';
    return kStaleIndex;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return 0;
}
