#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "netexplore/errors.hpp"
#include "netexplore/feature_vector.hpp"
#include "netexplore/graph.hpp"

namespace netexplore {

enum class NodeStatus : std::uint8_t { Unobserved = 0, Observed = 1, Probed = 2 };

inline const char* to_string(NodeStatus s) noexcept {
  switch (s) {
    case NodeStatus::Unobserved: return "unobserved";
    case NodeStatus::Observed: return "observed";
    case NodeStatus::Probed: return "probed";
  }
  return "?";
}

/// One probe, as the bandit sees it. The reward noise of the learning model
/// is realized by the graph itself and is not stored.
struct ProbeRecord {
  NodeId node{};
  FeatureVector features{};
  std::size_t reward{};  // newly observed nodes
  std::size_t step{};    // 1-based
};

struct ProbeResult {
  std::size_t reward{};
  std::vector<NodeId> newly_observed;
};

/// The observed overlay G'_t of a hidden ground-truth graph.
///
/// Statuses only move Unobserved -> Observed -> Probed. The candidate set is
/// exactly the set of Observed nodes. Observed edges are a subset of the
/// ground-truth edges; the initial sample installs them through
/// mark_observed/add_observed_edge and later growth happens only via probe.
class ExplorationState {
 public:
  ExplorationState() = default;
  explicit ExplorationState(std::size_t node_count)
      : status_(node_count, NodeStatus::Unobserved), observed_adj_(node_count) {}

  std::size_t node_count() const noexcept { return status_.size(); }
  std::size_t step() const noexcept { return step_; }
  std::size_t observed_count() const noexcept { return observed_count_; }  // |V'_t|
  std::size_t edge_count() const noexcept { return edge_keys_.size(); }
  const std::set<NodeId>& candidates() const noexcept { return candidates_; }
  const std::vector<ProbeRecord>& history() const noexcept { return history_; }

  NodeStatus status(NodeId v) const {
    check(v);
    return status_[v];
  }

  bool is_known(NodeId v) const { return status(v) != NodeStatus::Unobserved; }

  std::span<const NodeId> observed_neighbors(NodeId v) const {
    check(v);
    return observed_adj_[v];
  }

  /// Number of observed edges incident to v. Throws NodeNotObserved if v is
  /// still Unobserved.
  std::size_t observed_degree(NodeId v) const {
    if (!is_known(v)) throw NodeNotObserved("node " + std::to_string(v) + " is unobserved");
    return observed_adj_[v].size();
  }

  bool has_observed_edge(NodeId u, NodeId v) const {
    check(u);
    check(v);
    return edge_keys_.contains(key(u, v));
  }

  /// Observed edges as (u, v), u < v, ascending.
  std::vector<Edge> observed_edges() const {
    std::vector<Edge> out;
    out.reserve(edge_keys_.size());
    for (NodeId u = 0; u < node_count(); ++u) {
      for (NodeId v : observed_adj_[u]) {
        if (u < v) out.emplace_back(u, v);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Seeds an initial-sample node. Idempotent for nodes already Observed;
  /// never demotes a Probed node.
  void mark_observed(NodeId v) {
    check(v);
    if (status_[v] != NodeStatus::Unobserved) return;
    status_[v] = NodeStatus::Observed;
    candidates_.insert(v);
    ++observed_count_;
  }

  /// Seeds an initial-sample edge between two already known nodes. The
  /// caller guarantees the edge exists in the ground truth.
  bool add_observed_edge(NodeId u, NodeId v) {
    check(u);
    check(v);
    if (u == v) return false;
    if (!is_known(u) || !is_known(v)) {
      throw NodeNotObserved("edge endpoints must be observed before the edge");
    }
    return insert_edge(u, v);
  }

  /// Marks v Probed without touching edges. Only for restoring snapshots.
  void restore_probed(NodeId v) {
    mark_observed(v);
    if (status_[v] == NodeStatus::Observed) {
      status_[v] = NodeStatus::Probed;
      candidates_.erase(v);
    }
  }

  void restore_step(std::size_t step) { step_ = step; }

  /// Probes a candidate: reveals all of its ground-truth edges and neighbor
  /// identities. The reward is the number of neighbors that were Unobserved.
  ProbeResult probe(const GroundTruthGraph& truth, NodeId node, const FeatureVector& features) {
    check(node);
    if (truth.node_count() != node_count()) {
      throw NodeOutOfRange("ground truth and state disagree on node count");
    }
    if (status_[node] != NodeStatus::Observed) {
      throw ProbeNotCandidate("node " + std::to_string(node) + " is " + to_string(status_[node]) +
                              ", not a candidate");
    }
    ProbeResult result;
    for (NodeId w : truth.neighbors(node)) {
      if (status_[w] == NodeStatus::Unobserved) {
        status_[w] = NodeStatus::Observed;
        candidates_.insert(w);
        ++observed_count_;
        result.newly_observed.push_back(w);
        insert_edge_unchecked(node, w);
      } else if (status_[w] == NodeStatus::Observed) {
        insert_edge(node, w);
      }
      // A Probed neighbor already revealed this edge.
    }
    status_[node] = NodeStatus::Probed;
    candidates_.erase(node);
    result.reward = result.newly_observed.size();
    ++step_;
    history_.push_back(ProbeRecord{node, features, result.reward, step_});
    return result;
  }

  /// Reward probe(node) would yield, without mutating anything.
  std::size_t would_be_reward(const GroundTruthGraph& truth, NodeId node) const {
    std::size_t count = 0;
    for (NodeId w : truth.neighbors(node)) count += status_[w] == NodeStatus::Unobserved;
    return count;
  }

 private:
  static std::uint64_t key(NodeId u, NodeId v) noexcept {
    const auto [a, b] = canonical_edge(u, v);
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  bool insert_edge(NodeId u, NodeId v) {
    if (!edge_keys_.insert(key(u, v)).second) return false;
    observed_adj_[u].push_back(v);
    observed_adj_[v].push_back(u);
    return true;
  }

  void insert_edge_unchecked(NodeId u, NodeId v) {
    edge_keys_.insert(key(u, v));
    observed_adj_[u].push_back(v);
    observed_adj_[v].push_back(u);
  }

  void check(NodeId v) const {
    if (v >= status_.size()) {
      throw NodeOutOfRange("node " + std::to_string(v) + " >= " + std::to_string(status_.size()));
    }
  }

  std::vector<NodeStatus> status_;
  std::vector<std::vector<NodeId>> observed_adj_;
  std::unordered_set<std::uint64_t> edge_keys_;
  std::set<NodeId> candidates_;
  std::vector<ProbeRecord> history_;
  std::size_t observed_count_ = 0;
  std::size_t step_ = 0;
};

inline std::size_t observed_degree(const ExplorationState& state, NodeId node) {
  return state.observed_degree(node);
}

/// The candidate with the largest achievable reward right now, ties to the
/// smallest id. Used for regret accounting; needs the ground truth.
inline std::pair<NodeId, std::size_t> oracle_best_reward(const ExplorationState& state,
                                                         const GroundTruthGraph& truth) {
  if (state.candidates().empty()) throw NoCandidates("no candidates to evaluate");
  NodeId best = *state.candidates().begin();
  std::size_t best_reward = 0;
  bool first = true;
  for (NodeId v : state.candidates()) {
    const std::size_t r = state.would_be_reward(truth, v);
    if (first || r > best_reward) {
      best = v;
      best_reward = r;
      first = false;
    }
  }
  return {best, best_reward};
}

/// Checks every structural invariant of `state` against `truth`. Returns a
/// description of the first violation, or nullopt.
inline std::optional<std::string> find_invariant_violation(const ExplorationState& state,
                                                           const GroundTruthGraph& truth) {
  const std::size_t n = state.node_count();
  if (truth.node_count() != n) return "node count mismatch";
  std::size_t known = 0;
  for (NodeId v = 0; v < n; ++v) {
    const NodeStatus s = state.status(v);
    known += s != NodeStatus::Unobserved;
    if ((s == NodeStatus::Observed) != state.candidates().contains(v)) {
      return "candidate set disagrees with status of node " + std::to_string(v);
    }
    if (s == NodeStatus::Unobserved && !state.observed_neighbors(v).empty()) {
      return "unobserved node " + std::to_string(v) + " has observed edges";
    }
    for (NodeId w : state.observed_neighbors(v)) {
      if (!truth.has_edge(v, w)) {
        return "observed edge (" + std::to_string(v) + "," + std::to_string(w) + ") not in ground truth";
      }
    }
    if (s == NodeStatus::Probed) {
      for (NodeId w : truth.neighbors(v)) {
        if (!state.has_observed_edge(v, w) || state.status(w) == NodeStatus::Unobserved) {
          return "probed node " + std::to_string(v) + " misses neighbor " + std::to_string(w);
        }
      }
    }
  }
  if (known != state.observed_count()) return "observed count out of sync";
  std::size_t prev = 0;
  for (const auto& rec : state.history()) {
    if (rec.step <= prev) return "history steps not strictly increasing";
    prev = rec.step;
    if (rec.reward > truth.degree(rec.node)) return "reward exceeds true degree";
    if (state.status(rec.node) != NodeStatus::Probed) return "history node not probed";
  }
  return std::nullopt;
}

}  // namespace netexplore
