#pragma once
// Brute-force reference implementations and random instance builders used by
// the unit tests and the acceptance binary. Written against the definitions,
// not against the library internals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "netexplore/netexplore.hpp"

namespace netexplore::oracle {

struct RefNeighbor {
  std::size_t index;
  double y;
  double distance;
};

// Sort everything by (distance, index) and keep the first k.
inline std::vector<RefNeighbor> brute_knn(const std::vector<LabeledPoint>& pts, const FeatureVector& x, std::size_t k) {
  std::vector<RefNeighbor> all;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double s = 0.0;
    for (std::size_t d = 0; d < kFeatureDim; ++d) s += (x[d] - pts[i].x[d]) * (x[d] - pts[i].x[d]);
    all.push_back({i, pts[i].y, std::sqrt(s)});
  }
  std::sort(all.begin(), all.end(), [](const RefNeighbor& a, const RefNeighbor& b) {
    return std::tie(a.distance, a.index) < std::tie(b.distance, b.index);
  });
  all.resize(std::min(k, all.size()));
  return all;
}

inline double brute_estimate(const std::vector<RefNeighbor>& nb, double eps = 1e-6) {
  double s = 0.0;
  for (const auto& n : nb) s += n.y / std::max(n.distance, eps);
  return s / static_cast<double>(nb.size());
}

inline double brute_sigma(const std::vector<RefNeighbor>& nb) {
  double s = 0.0;
  for (const auto& n : nb) s += n.distance;
  return s / static_cast<double>(nb.size());
}

// Random point sets. Coarse grids make exact distance ties common.
inline std::vector<LabeledPoint> random_points(Rng& rng, std::size_t count, bool grid) {
  std::vector<LabeledPoint> pts(count);
  for (auto& p : pts) {
    for (std::size_t d = 0; d < kFeatureDim; ++d) {
      p.x[d] = grid ? static_cast<double>(rng.uniform_index(4)) * 0.25 : rng.uniform01();
    }
    p.y = static_cast<double>(rng.uniform_index(30));
  }
  return pts;
}

inline FeatureVector random_query(Rng& rng, bool grid) {
  FeatureVector x;
  for (std::size_t d = 0; d < kFeatureDim; ++d) {
    x[d] = grid ? static_cast<double>(rng.uniform_index(4)) * 0.25 : rng.uniform01();
  }
  return x;
}

// Erdos-Renyi style graph with a planted path so most of it is connected.
inline GroundTruthGraph random_graph(Rng& rng, std::size_t n, double avg_degree) {
  std::vector<Edge> edges;
  for (NodeId v = 1; v < n; ++v) {
    if (rng.bernoulli(0.7)) edges.emplace_back(static_cast<NodeId>(rng.uniform_index(v)), v);
  }
  const auto extra = static_cast<std::size_t>(avg_degree * static_cast<double>(n) / 2.0);
  for (std::size_t i = 0; i < extra; ++i) {
    edges.emplace_back(static_cast<NodeId>(rng.uniform_index(n)), static_cast<NodeId>(rng.uniform_index(n)));
  }
  return GroundTruthGraph::from_edges(n, edges);
}

// Features straight from the definitions, using only the observed edge list.
inline FeatureVector brute_features(const ExplorationState& s, NodeId v) {
  std::map<NodeId, std::set<NodeId>> adj;
  for (const auto& [a, b] : s.observed_edges()) {
    adj[a].insert(b);
    adj[b].insert(a);
  }
  FeatureVector f;
  const auto& nb = adj[v];
  if (nb.empty() || s.observed_count() <= 1) return f;
  const double others = static_cast<double>(s.observed_count() - 1);
  std::vector<double> c;
  std::size_t probed = 0;
  for (NodeId w : nb) {
    c.push_back(static_cast<double>(adj[w].size()) / others);
    probed += s.status(w) == NodeStatus::Probed;
  }
  std::sort(c.begin(), c.end());
  double sum = 0.0;
  for (double x : c) sum += x;
  f[0] = static_cast<double>(nb.size()) / others;
  f[1] = sum / static_cast<double>(c.size());
  f[2] = c.size() % 2 ? c[c.size() / 2] : (c[c.size() / 2 - 1] + c[c.size() / 2]) / 2.0;
  f[3] = static_cast<double>(probed) / static_cast<double>(c.size());
  return f;
}

// UCB argmax by exhaustive search over candidates.
inline NodeId brute_ucb_choice(const std::vector<CandidateFeatures>& cands, const std::vector<LabeledPoint>& pts,
                               std::size_t k, double alpha) {
  NodeId best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& c : cands) {
    const auto nb = brute_knn(pts, c.x, k);
    const double score = brute_estimate(nb) + alpha * brute_sigma(nb);
    if (score > best_score || (score == best_score && c.node < best)) {
      best = c.node;
      best_score = score;
    }
  }
  return best;
}

// The four state invariants plus candidate bookkeeping, recomputed from the
// public observed_edges() list only. Empty string when everything holds.
inline std::string state_violation(const ExplorationState& s, const GroundTruthGraph& g) {
  std::set<Edge> observed;
  for (const auto& e : s.observed_edges()) observed.insert(e);
  std::set<NodeId> expect_candidates;
  for (NodeId v = 0; v < s.node_count(); ++v) {
    if (s.status(v) == NodeStatus::Observed) expect_candidates.insert(v);
  }
  if (expect_candidates != s.candidates()) return "candidates != {v : Observed}";
  for (const auto& [u, v] : observed) {
    if (!g.has_edge(u, v)) return "observed edge outside E";
    if (s.status(u) == NodeStatus::Unobserved || s.status(v) == NodeStatus::Unobserved) {
      return "observed edge with an unobserved endpoint";
    }
  }
  for (NodeId u = 0; u < s.node_count(); ++u) {
    if (s.status(u) != NodeStatus::Probed) continue;
    for (NodeId w : g.neighbors(u)) {
      if (!observed.contains(canonical_edge(u, w))) return "probed node missing an incident edge";
      if (s.status(w) == NodeStatus::Unobserved) return "neighbor of a probed node is unobserved";
    }
  }
  return {};
}

}  // namespace netexplore::oracle
