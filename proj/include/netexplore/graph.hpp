#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netexplore/errors.hpp"

namespace netexplore {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

inline Edge canonical_edge(NodeId u, NodeId v) noexcept {
  return u < v ? Edge{u, v} : Edge{v, u};
}

/// Immutable undirected simple graph in compressed sparse row form.
///
/// Neighbor lists are sorted ascending, free of self-loops and duplicates,
/// and symmetric. Node ids are dense in [0, node_count). LFR graphs also
/// carry one community label per node.
class GroundTruthGraph {
 public:
  GroundTruthGraph() = default;

  /// Builds from an arbitrary edge list. Self-loops and repeated edges (in
  /// either orientation) are dropped. Throws NodeOutOfRange for ids outside
  /// [0, node_count).
  static GroundTruthGraph from_edges(std::size_t node_count, std::span<const Edge> edges,
                                     std::optional<std::vector<int>> communities = std::nullopt) {
    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (const auto& [u, v] : edges) {
      if (u >= node_count || v >= node_count) {
        throw NodeOutOfRange("edge (" + std::to_string(u) + "," + std::to_string(v) +
                             ") outside node range " + std::to_string(node_count));
      }
      if (u != v) canon.push_back(canonical_edge(u, v));
    }
    std::sort(canon.begin(), canon.end());
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
    return from_canonical(node_count, canon, std::move(communities));
  }

  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const {
    check(v);
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }

  std::size_t degree(NodeId v) const {
    check(v);
    return offsets_[v + 1] - offsets_[v];
  }

  bool has_edge(NodeId u, NodeId v) const {
    const auto adj = neighbors(u);
    check(v);
    return std::binary_search(adj.begin(), adj.end(), v);
  }

  /// Every edge once as (u, v) with u < v, ascending.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeId u = 0; u < node_count(); ++u) {
      for (NodeId v : neighbors(u)) {
        if (u < v) out.emplace_back(u, v);
      }
    }
    return out;
  }

  const std::optional<std::vector<int>>& community_labels() const noexcept { return communities_; }

  void set_community_labels(std::vector<int> labels) {
    if (labels.size() != node_count()) {
      throw InvalidParams("community labels must cover every node");
    }
    communities_ = std::move(labels);
  }

  friend bool operator==(const GroundTruthGraph&, const GroundTruthGraph&) = default;

 private:
  static GroundTruthGraph from_canonical(std::size_t node_count, std::span<const Edge> sorted_unique,
                                         std::optional<std::vector<int>> communities) {
    GroundTruthGraph g;
    std::vector<std::size_t> degree(node_count, 0);
    for (const auto& [u, v] : sorted_unique) {
      ++degree[u];
      ++degree[v];
    }
    g.offsets_.assign(node_count + 1, 0);
    for (std::size_t i = 0; i < node_count; ++i) g.offsets_[i + 1] = g.offsets_[i] + degree[i];
    g.neighbors_.resize(g.offsets_.back());
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    // Canonical edges sorted by (u, v): emitting v into u's list and u into
    // v's list in this order keeps every list ascending.
    for (const auto& [u, v] : sorted_unique) g.neighbors_[fill[v]++] = u;
    for (const auto& [u, v] : sorted_unique) g.neighbors_[fill[u]++] = v;
    for (NodeId v = 0; v < node_count; ++v) {
      auto first = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
      auto last = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
      if (!std::is_sorted(first, last)) std::sort(first, last);
    }
    if (communities) g.set_community_labels(std::move(*communities));
    return g;
  }

  void check(NodeId v) const {
    if (v >= node_count()) {
      throw NodeOutOfRange("node " + std::to_string(v) + " >= " + std::to_string(node_count()));
    }
  }

  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::optional<std::vector<int>> communities_;
};

}  // namespace netexplore
