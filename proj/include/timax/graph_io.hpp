#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "timax/error.hpp"
#include "timax/graph.hpp"
#include "timax/text.hpp"

namespace timax {

inline constexpr std::string_view kGraphMagic = "timax-graph";
inline constexpr std::string_view kGraphVersion = "v1";

/// Canonical text form: header, then one `u v topic probability` line per
/// stored entry in (u, v, topic) order. Edges without any nonzero topic are
/// written as `u v 0 0` so they survive a round trip.
inline void write_graph(std::ostream& out, const TopicGraph& graph) {
  out << kGraphMagic << ' ' << kGraphVersion << " nodes=" << graph.node_count() << " topics=" << graph.topic_count()
      << '\n';
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    const auto entries = graph.topics(e);
    if (entries.empty()) {
      out << graph.source(e) << ' ' << graph.target(e) << " 0 0\n";
      continue;
    }
    for (const auto& [topic, prob] : entries) {
      out << graph.source(e) << ' ' << graph.target(e) << ' ' << topic << ' ' << text::format_double(prob) << '\n';
    }
  }
}

inline std::string graph_to_string(const TopicGraph& graph) {
  std::ostringstream out;
  write_graph(out, graph);
  return out.str();
}

/// Content hash of the canonical serialization; two graphs with equal
/// structure and probabilities share a fingerprint.
inline std::string graph_fingerprint(const TopicGraph& graph) {
  return text::hex64(text::fnv1a(graph_to_string(graph)));
}

inline TopicGraph read_graph(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_content_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      const auto tokens = text::split_whitespace(line);
      if (tokens.empty() || tokens.front().starts_with('#')) continue;
      return true;
    }
    return false;
  };

  if (!next_content_line()) throw FormatError(line_no, "missing timax-graph header");
  const auto header = text::split_whitespace(line);
  if (header.size() != 4 || header[0] != kGraphMagic) throw FormatError(line_no, "expected 'timax-graph v1 nodes=<N> topics=<d>'");
  if (header[1] != kGraphVersion) throw FormatError(line_no, "unsupported graph format version " + std::string(header[1]));
  const auto nodes_field = text::field(header[2], "nodes");
  const auto topics_field = text::field(header[3], "topics");
  const auto nodes = nodes_field ? text::parse_uint(*nodes_field) : std::nullopt;
  const auto topics = topics_field ? text::parse_uint(*topics_field) : std::nullopt;
  if (!nodes || !topics || *nodes == 0 || *topics == 0) throw FormatError(line_no, "header needs positive nodes= and topics=");

  GraphBuilder builder(*nodes, *topics);
  std::map<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>, std::size_t> seen;
  while (next_content_line()) {
    const auto tokens = text::split_whitespace(line);
    if (tokens.size() != 4) throw FormatError(line_no, "expected '<u> <v> <topic> <probability>'");
    const auto u = text::parse_uint(tokens[0]);
    const auto v = text::parse_uint(tokens[1]);
    const auto t = text::parse_uint(tokens[2]);
    const auto p = text::parse_double(tokens[3]);
    if (!u || !v || !t || !p) throw FormatError(line_no, "malformed number");
    if (*u >= *nodes || *v >= *nodes) throw FormatError(line_no, "node id out of range");
    if (*t >= *topics) throw FormatError(line_no, "topic index out of range");
    if (!(*p >= 0.0 && *p <= 1.0)) throw FormatError(line_no, "probability outside [0,1]");
    if (*u == *v && *p > 0.0) throw FormatError(line_no, "self-loop with nonzero probability");
    auto [it, inserted] = seen.emplace(std::tuple{*u, *v, *t}, line_no);
    if (!inserted) {
      throw FormatError(line_no, "duplicate entry for edge (" + std::string(tokens[0]) + "," + std::string(tokens[1]) +
                                     ") topic " + std::string(tokens[2]) + " (first at line " +
                                     std::to_string(it->second) + ")");
    }
    builder.add(static_cast<NodeId>(*u), static_cast<NodeId>(*v), static_cast<TopicId>(*t), *p);
  }
  return std::move(builder).build();
}

inline TopicGraph read_graph_string(const std::string& s) {
  std::istringstream in(s);
  return read_graph(in);
}

inline TopicGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open graph file " + path);
  return read_graph(in);
}

inline void save_graph(const std::string& path, const TopicGraph& graph) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write graph file " + path);
  write_graph(out, graph);
  if (!out) throw InvalidInput("failed writing graph file " + path);
}

/// Optional sidecar mapping dense node ids to external labels, one
/// `<id> <label>` per line. Unlisted ids fall back to their decimal form.
class NodeLabels {
 public:
  NodeLabels() = default;

  static NodeLabels read(std::istream& in) {
    NodeLabels labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto tokens = text::split_whitespace(line);
      if (tokens.empty() || tokens.front().starts_with('#')) continue;
      if (tokens.size() != 2) throw FormatError(line_no, "expected '<id> <label>'");
      const auto id = text::parse_uint(tokens[0]);
      if (!id) throw FormatError(line_no, "malformed node id");
      labels.labels_[static_cast<NodeId>(*id)] = std::string(tokens[1]);
    }
    return labels;
  }

  static NodeLabels load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open label file " + path);
    return read(in);
  }

  std::string label(NodeId id) const {
    auto it = labels_.find(id);
    return it == labels_.end() ? std::to_string(id) : it->second;
  }

 private:
  std::map<NodeId, std::string> labels_;
};

}  // namespace timax
