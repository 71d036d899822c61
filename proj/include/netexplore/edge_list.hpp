#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "netexplore/errors.hpp"
#include "netexplore/graph.hpp"

namespace netexplore {

struct LoadedGraph {
  GroundTruthGraph graph;
  // original_ids[dense] is the id used in the file.
  std::vector<std::uint64_t> original_ids;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Splits on spaces/tabs.
inline std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

// "# nodes: N ..." header (case-insensitive key, SNAP style "# Nodes: N").
inline std::optional<std::uint64_t> node_count_header(std::string_view comment) {
  auto toks = tokens(trim(comment.substr(1)));
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    std::string key(toks[i]);
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    if (key == "nodes:") return parse_u64(toks[i + 1]);
  }
  return std::nullopt;
}

}  // namespace detail

/// Reads a SNAP-style undirected edge list: one "u v" pair per line, '#'
/// comment lines, blank lines ignored. Self-loops and repeated edges are
/// dropped. Ids are kept as-is when a "# nodes: N" header is present and
/// every id is below N; otherwise they are remapped to dense ranks in
/// ascending original-id order.
inline LoadedGraph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::optional<std::uint64_t> declared_nodes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      if (!declared_nodes) declared_nodes = detail::node_count_header(text);
      continue;
    }
    const auto toks = detail::tokens(text);
    if (toks.size() != 2) throw ParseError("expected two node ids, got " + std::to_string(toks.size()) + " fields", lineno);
    const auto u = detail::parse_u64(toks[0]);
    const auto v = detail::parse_u64(toks[1]);
    if (!u || !v) throw ParseError("node ids must be non-negative integers", lineno);
    raw.emplace_back(*u, *v);
  }

  std::vector<std::uint64_t> ids;
  ids.reserve(raw.size() * 2);
  for (const auto& [u, v] : raw) {
    ids.push_back(u);
    ids.push_back(v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  const bool identity = declared_nodes && *declared_nodes <= UINT32_MAX &&
                        (ids.empty() || ids.back() < *declared_nodes);
  LoadedGraph out;
  if (identity) {
    out.original_ids.resize(*declared_nodes);
    for (std::size_t i = 0; i < out.original_ids.size(); ++i) out.original_ids[i] = i;
  } else {
    if (ids.size() > UINT32_MAX) throw ParseError("too many distinct nodes", lineno);
    out.original_ids = ids;
  }
  if (out.original_ids.empty()) throw EmptyGraph(path.string() + " contains no nodes");

  std::vector<Edge> edges;
  edges.reserve(raw.size());
  auto dense = [&](std::uint64_t id) {
    if (identity) return static_cast<NodeId>(id);
    return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  for (const auto& [u, v] : raw) edges.emplace_back(dense(u), dense(v));
  out.graph = GroundTruthGraph::from_edges(out.original_ids.size(), edges);
  return out;
}

/// Canonical form: each edge once as "u v" with u < v in ascending order.
/// Graphs with isolated nodes get a leading "# nodes: N" line so that
/// reloading preserves every id.
inline void write_edge_list(const GroundTruthGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  bool isolated = false;
  for (NodeId v = 0; v < graph.node_count() && !isolated; ++v) isolated = graph.degree(v) == 0;
  if (isolated) out << "# nodes: " << graph.node_count() << '\n';
  for (const auto& [u, v] : graph.edges()) out << u << ' ' << v << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

/// "dense_id<TAB>original_id" lines.
inline void write_id_map(std::span<const std::uint64_t> original_ids, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t i = 0; i < original_ids.size(); ++i) out << i << '\t' << original_ids[i] << '\n';
}

/// Community sidecar: "node_id<TAB>community_id" per line.
inline void write_communities(const GroundTruthGraph& graph, const std::filesystem::path& path) {
  const auto& labels = graph.community_labels();
  if (!labels) throw IoError("graph has no community labels");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t v = 0; v < labels->size(); ++v) out << v << '\t' << (*labels)[v] << '\n';
}

/// Reads a community sidecar whose node ids are in the same id space as the
/// edge list that produced `loaded`, and attaches the labels.
inline void load_communities(LoadedGraph& loaded, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::unordered_map<std::uint64_t, NodeId> dense;
  dense.reserve(loaded.original_ids.size());
  for (std::size_t i = 0; i < loaded.original_ids.size(); ++i) dense.emplace(loaded.original_ids[i], static_cast<NodeId>(i));

  std::vector<int> labels(loaded.graph.node_count(), -1);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto toks = detail::tokens(text);
    if (toks.size() != 2) throw ParseError("expected node and community", lineno);
    const auto node = detail::parse_u64(toks[0]);
    const auto community = detail::parse_u64(toks[1]);
    if (!node || !community || *community > INT32_MAX) throw ParseError("bad integer", lineno);
    const auto it = dense.find(*node);
    if (it == dense.end()) throw ParseError("unknown node " + std::to_string(*node), lineno);
    labels[it->second] = static_cast<int>(*community);
  }
  if (std::find(labels.begin(), labels.end(), -1) != labels.end()) {
    throw ParseError("community sidecar does not cover every node", lineno);
  }
  loaded.graph.set_community_labels(std::move(labels));
}

}  // namespace netexplore
