#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "timax/error.hpp"
#include "timax/preprocess.hpp"
#include "timax/text.hpp"

namespace timax {

inline constexpr std::string_view kIndexMagic = "timax-index";
inline constexpr std::string_view kIndexVersion = "v1";

/// Text form:
///   timax-index v1 fingerprint=<hex> k=<k> topics=<d> landmarks=<l0,...,lm> selector=<name> oracle=<desc>
///   entry topic=<i> landmark=<value> spread=<value> se=<value|NA>
///   <rank> <node> <MI> <cumulative>      (one line per seed)
/// Doubles use the shortest representation that reads back bit-exactly.
inline void write_index(std::ostream& out, const LandmarkIndex& index) {
  out << kIndexMagic << ' ' << kIndexVersion << " fingerprint=" << index.fingerprint() << " k=" << index.k()
      << " topics=" << index.topic_count() << " landmarks=" << index.landmarks().to_string()
      << " selector=" << index.selector() << " oracle=" << index.oracle().describe() << '\n';
  for (const auto& e : index.entries()) {
    out << "entry topic=" << e.topic << " landmark=" << text::format_double(e.landmark)
        << " spread=" << text::format_double(e.result.spread)
        << " se=" << (e.result.standard_error ? text::format_double(*e.result.standard_error) : std::string("NA"))
        << '\n';
    for (const auto& s : e.result.seeds) {
      out << s.rank << ' ' << s.node << ' ' << text::format_double(s.marginal) << ' '
          << text::format_double(s.cumulative) << '\n';
    }
  }
}

inline void save_index(const std::string& path, const LandmarkIndex& index) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write index file " + path);
  write_index(out, index);
  if (!out) throw InvalidInput("failed writing index file " + path);
}

inline std::string index_to_string(const LandmarkIndex& index) {
  std::ostringstream out;
  write_index(out, index);
  return out.str();
}

namespace detail {

inline std::string_view require_field(std::string_view token, std::string_view key, std::size_t line) {
  const auto value = text::field(token, key);
  if (!value) throw FormatError(line, "expected " + std::string(key) + "=<value>");
  return *value;
}

inline double require_double(std::string_view s, std::size_t line) {
  const auto v = text::parse_double(s);
  if (!v) throw FormatError(line, "malformed number '" + std::string(s) + "'");
  return *v;
}

inline std::uint64_t require_uint(std::string_view s, std::size_t line) {
  const auto v = text::parse_uint(s);
  if (!v) throw FormatError(line, "malformed integer '" + std::string(s) + "'");
  return *v;
}

}  // namespace detail

/// Parse and validate an index. When `graph` is given, its fingerprint must
/// match the one recorded in the file.
inline LandmarkIndex read_index(std::istream& in, const TopicGraph* graph = nullptr) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  std::size_t pos = 0;

  if (lines.empty()) throw FormatError(0, "empty index file");
  const auto header = text::split_whitespace(lines[0]);
  if (header.size() != 8 || header[0] != kIndexMagic) throw FormatError(1, "expected timax-index header");
  if (header[1] != kIndexVersion) throw FormatError(1, "unsupported index format version " + std::string(header[1]));
  const std::string fingerprint(detail::require_field(header[2], "fingerprint", 1));
  const auto k = detail::require_uint(detail::require_field(header[3], "k", 1), 1);
  const auto topics = detail::require_uint(detail::require_field(header[4], "topics", 1), 1);
  std::optional<LandmarkSet> landmarks;
  std::optional<OracleConfig> oracle;
  try {
    landmarks = LandmarkSet::parse(detail::require_field(header[5], "landmarks", 1));
    oracle = OracleConfig::parse(detail::require_field(header[7], "oracle", 1));
  } catch (const InvalidInput& e) {
    throw FormatError(1, e.what());
  }
  const std::string selector(detail::require_field(header[6], "selector", 1));
  if (k == 0 || topics == 0) throw FormatError(1, "k and topics must be positive");
  pos = 1;

  const std::size_t expected = topics * landmarks->size();
  std::vector<IndexEntry> entries;
  entries.reserve(expected);
  while (pos < lines.size()) {
    const std::size_t line_no = pos + 1;
    const auto tokens = text::split_whitespace(lines[pos]);
    if (tokens.empty()) {
      ++pos;
      continue;
    }
    if (tokens.size() != 5 || tokens[0] != "entry") throw FormatError(line_no, "expected entry line");
    IndexEntry e;
    e.topic = static_cast<TopicId>(detail::require_uint(detail::require_field(tokens[1], "topic", line_no), line_no));
    e.landmark = detail::require_double(detail::require_field(tokens[2], "landmark", line_no), line_no);
    e.result.spread = detail::require_double(detail::require_field(tokens[3], "spread", line_no), line_no);
    const auto se = detail::require_field(tokens[4], "se", line_no);
    if (se != "NA") e.result.standard_error = detail::require_double(se, line_no);
    e.result.oracle = *oracle;
    if (entries.size() >= expected) throw FormatError(line_no, "more entries than topics x landmarks");
    const std::size_t slot = entries.size();
    if (e.topic != slot / landmarks->size() || e.landmark != (*landmarks)[slot % landmarks->size()]) {
      throw FormatError(line_no, "entry out of (topic, landmark) order");
    }
    ++pos;
    while (pos < lines.size()) {
      const auto seed = text::split_whitespace(lines[pos]);
      if (seed.empty()) {
        ++pos;
        continue;
      }
      if (seed[0] == "entry") break;
      if (seed.size() != 4) throw FormatError(pos + 1, "expected '<rank> <node> <MI> <cumulative>'");
      SeedRecord r;
      r.rank = detail::require_uint(seed[0], pos + 1);
      r.node = static_cast<NodeId>(detail::require_uint(seed[1], pos + 1));
      r.marginal = detail::require_double(seed[2], pos + 1);
      r.cumulative = detail::require_double(seed[3], pos + 1);
      if (r.rank != e.result.seeds.size() + 1) throw FormatError(pos + 1, "seed rank out of order");
      if (r.rank > k) throw FormatError(pos + 1, "entry has more than k seeds");
      if (graph && r.node >= graph->node_count()) throw FormatError(pos + 1, "seed node out of range for graph");
      e.result.seeds.push_back(r);
      ++pos;
    }
    if (!entries.empty() && entries.front().result.seeds.size() != e.result.seeds.size()) {
      throw FormatError(pos, "entry seed count differs from the first entry");
    }
    entries.push_back(std::move(e));
  }
  if (entries.size() != expected) {
    throw FormatError(lines.size(), "index has " + std::to_string(entries.size()) + " entries, expected " +
                                        std::to_string(expected) + " (truncated file?)");
  }
  try {
    LandmarkIndex index(fingerprint, k, topics, std::move(*landmarks), selector, *oracle, std::move(entries));
    if (graph) index.check_graph(*graph);
    return index;
  } catch (const InvalidInput& e) {
    throw FormatError(lines.size(), e.what());
  }
}

inline LandmarkIndex load_index(const std::string& path, const TopicGraph* graph = nullptr) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open index file " + path);
  return read_index(in, graph);
}

inline LandmarkIndex read_index_string(const std::string& s, const TopicGraph* graph = nullptr) {
  std::istringstream in(s);
  return read_index(in, graph);
}

}  // namespace timax
