#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netexplore/edge_list.hpp"
#include "netexplore/errors.hpp"
#include "netexplore/exploration.hpp"
#include "netexplore/graph.hpp"
#include "netexplore/rng.hpp"

namespace netexplore {

enum class SampleMethod { RN, BFS };

// Which ground-truth edges the initial sample exposes.
enum class EdgePolicy {
  InducedSubgraph,     // every edge between two sampled nodes
  DiscoveryEdgesOnly,  // only the edges along which nodes were first reached
};

struct SampleSpec {
  SampleMethod method = SampleMethod::RN;
  double fraction = 0.05;
  std::uint64_t seed = 0;
  EdgePolicy edge_policy = EdgePolicy::InducedSubgraph;
  std::optional<NodeId> start;  // first node; uniform random when empty
};

/// ceil(fraction * n), with a relative guard against products like
/// 0.05 * 100 landing a hair above an integer.
inline std::size_t sample_target(double fraction, std::size_t n) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InvalidFraction("sample fraction must lie in (0, 1], got " + std::to_string(fraction));
  }
  if (n == 0) throw InvalidFraction("cannot sample an empty graph");
  const double raw = fraction * static_cast<double>(n);
  const auto target = static_cast<std::size_t>(std::ceil(raw * (1.0 - 1e-12)));
  return std::min(std::max<std::size_t>(target, 1), n);
}

namespace detail {

// Tracks the sampled set and its unsampled boundary while a sampler grows it.
class SampleBuilder {
 public:
  SampleBuilder(const GroundTruthGraph& truth, Rng& rng)
      : truth_(truth), rng_(rng), sampled_(truth.node_count(), false), frontier_(truth.node_count(), false) {}

  bool sampled(NodeId v) const { return sampled_[v]; }
  std::size_t size() const { return order_.size(); }
  std::size_t frontier_size() const { return frontier_size_; }
  const std::vector<NodeId>& order() const { return order_; }

  void add(NodeId v, std::optional<NodeId> parent) {
    sampled_[v] = true;
    order_.push_back(v);
    if (frontier_[v]) {
      frontier_[v] = false;
      --frontier_size_;
    }
    for (NodeId w : truth_.neighbors(v)) {
      if (!sampled_[w] && !frontier_[w]) {
        frontier_[w] = true;
        ++frontier_size_;
      }
    }
    if (parent) discovery_.push_back(canonical_edge(*parent, v));
  }

  NodeId random_unsampled() {
    const std::size_t n = truth_.node_count();
    for (int attempt = 0; attempt < 64; ++attempt) {
      const auto v = static_cast<NodeId>(rng_.uniform_index(n));
      if (!sampled_[v]) return v;
    }
    std::vector<NodeId> pool;
    for (NodeId v = 0; v < n; ++v) {
      if (!sampled_[v]) pool.push_back(v);
    }
    return pool[rng_.uniform_index(pool.size())];
  }

  ExplorationState finish(EdgePolicy policy) const {
    ExplorationState state(truth_.node_count());
    for (NodeId v : order_) state.mark_observed(v);
    if (policy == EdgePolicy::DiscoveryEdgesOnly) {
      for (const auto& [u, v] : discovery_) state.add_observed_edge(u, v);
    } else {
      for (NodeId v : order_) {
        for (NodeId w : truth_.neighbors(v)) {
          if (v < w && sampled_[w]) state.add_observed_edge(v, w);
        }
      }
    }
    return state;
  }

 private:
  const GroundTruthGraph& truth_;
  Rng& rng_;
  std::vector<bool> sampled_;
  std::vector<bool> frontier_;
  std::size_t frontier_size_ = 0;
  std::vector<NodeId> order_;
  std::vector<Edge> discovery_;
};

inline NodeId first_node(const GroundTruthGraph& truth, const SampleSpec& spec, Rng& rng) {
  if (spec.start) {
    if (*spec.start >= truth.node_count()) throw NodeOutOfRange("sample start outside graph");
    return *spec.start;
  }
  return static_cast<NodeId>(rng.uniform_index(truth.node_count()));
}

}  // namespace detail

/// Random neighbor chaining: repeatedly pick a uniform sampled node and add
/// a uniform ground-truth neighbor of it. When no sampled node has an
/// unsampled neighbor left, restart from a fresh random node.
inline ExplorationState sample_rn(const GroundTruthGraph& truth, const SampleSpec& spec) {
  const std::size_t target = sample_target(spec.fraction, truth.node_count());
  Rng rng(spec.seed);
  detail::SampleBuilder b(truth, rng);
  b.add(detail::first_node(truth, spec, rng), std::nullopt);
  while (b.size() < target) {
    if (b.frontier_size() == 0) {
      b.add(b.random_unsampled(), std::nullopt);
      continue;
    }
    const NodeId u = b.order()[rng.uniform_index(b.size())];
    const auto nbrs = truth.neighbors(u);
    if (nbrs.empty()) continue;
    const NodeId w = nbrs[rng.uniform_index(nbrs.size())];
    if (!b.sampled(w)) b.add(w, u);
  }
  return b.finish(spec.edge_policy);
}

/// Breadth-first traversal from a random root; neighbors are visited in a
/// seeded random order and join the sample as they are discovered.
inline ExplorationState sample_bfs(const GroundTruthGraph& truth, const SampleSpec& spec) {
  const std::size_t target = sample_target(spec.fraction, truth.node_count());
  Rng rng(spec.seed);
  detail::SampleBuilder b(truth, rng);
  std::deque<NodeId> queue;
  const NodeId root = detail::first_node(truth, spec, rng);
  b.add(root, std::nullopt);
  queue.push_back(root);
  std::vector<NodeId> nbrs;
  while (b.size() < target) {
    if (queue.empty()) {
      const NodeId r = b.random_unsampled();
      b.add(r, std::nullopt);
      queue.push_back(r);
      continue;
    }
    const NodeId u = queue.front();
    queue.pop_front();
    const auto adj = truth.neighbors(u);
    nbrs.assign(adj.begin(), adj.end());
    rng.shuffle(std::span<NodeId>(nbrs));
    for (NodeId w : nbrs) {
      if (b.size() >= target) break;
      if (b.sampled(w)) continue;
      b.add(w, u);
      queue.push_back(w);
    }
  }
  return b.finish(spec.edge_policy);
}

inline ExplorationState sample(const GroundTruthGraph& truth, const SampleSpec& spec) {
  return spec.method == SampleMethod::RN ? sample_rn(truth, spec) : sample_bfs(truth, spec);
}

// Snapshot text format:
//   # netexplore snapshot v1
//   nodes <N>
//   step <t>
//   observed <v>      one line per Observed node
//   probed <v>        one line per Probed node
//   edge <u> <v>      one line per observed edge, u < v
// Probe history is not part of a snapshot.

inline void write_snapshot(const ExplorationState& state, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# netexplore snapshot v1\n";
  out << "nodes " << state.node_count() << '\n';
  out << "step " << state.step() << '\n';
  for (NodeId v = 0; v < state.node_count(); ++v) {
    if (state.status(v) == NodeStatus::Observed) out << "observed " << v << '\n';
  }
  for (NodeId v = 0; v < state.node_count(); ++v) {
    if (state.status(v) == NodeStatus::Probed) out << "probed " << v << '\n';
  }
  for (const auto& [u, v] : state.observed_edges()) out << "edge " << u << ' ' << v << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

/// Reads a snapshot. When `truth` is given the restored state is checked
/// against it and a ParseError names the first broken invariant.
inline ExplorationState read_snapshot(const std::filesystem::path& path,
                                      const GroundTruthGraph* truth = nullptr) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::optional<ExplorationState> state;
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  auto need_state = [&] {
    if (!state) throw ParseError("'nodes' line must come first", lineno);
  };
  auto node_arg = [&](std::string_view tok) {
    const auto v = detail::parse_u64(tok);
    if (!v || *v >= state->node_count()) throw ParseError("bad node id", lineno);
    return static_cast<NodeId>(*v);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto toks = detail::tokens(text);
    if (toks[0] == "nodes" && toks.size() == 2) {
      const auto n = detail::parse_u64(toks[1]);
      if (!n || *n > UINT32_MAX) throw ParseError("bad node count", lineno);
      if (state) throw ParseError("duplicate 'nodes' line", lineno);
      state.emplace(*n);
    } else if (toks[0] == "step" && toks.size() == 2) {
      need_state();
      const auto t = detail::parse_u64(toks[1]);
      if (!t) throw ParseError("bad step", lineno);
      state->restore_step(*t);
    } else if (toks[0] == "observed" && toks.size() == 2) {
      need_state();
      state->mark_observed(node_arg(toks[1]));
    } else if (toks[0] == "probed" && toks.size() == 2) {
      need_state();
      state->restore_probed(node_arg(toks[1]));
    } else if (toks[0] == "edge" && toks.size() == 3) {
      need_state();
      edges.emplace_back(node_arg(toks[1]), node_arg(toks[2]));
    } else {
      throw ParseError("unrecognized snapshot line", lineno);
    }
  }
  if (!state) throw ParseError("snapshot has no 'nodes' line", lineno);
  for (const auto& [u, v] : edges) {
    try {
      state->add_observed_edge(u, v);
    } catch (const NodeNotObserved&) {
      throw ParseError("edge (" + std::to_string(u) + "," + std::to_string(v) + ") touches an unobserved node", lineno);
    }
  }
  if (truth) {
    if (const auto bad = find_invariant_violation(*state, *truth)) {
      throw ParseError("snapshot inconsistent with graph: " + *bad, lineno);
    }
  }
  return std::move(*state);
}

}  // namespace netexplore
