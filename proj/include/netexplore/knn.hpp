#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "netexplore/errors.hpp"
#include "netexplore/feature_vector.hpp"

namespace netexplore {

struct LabeledPoint {
  FeatureVector x;
  double y = 0.0;
};

/// Append-only training set of (feature vector, observed reward).
class LabeledPointSet {
 public:
  void append(const FeatureVector& x, double y) {
    if (!(y >= 0.0)) throw InvalidParams("rewards must be non-negative");
    points_.push_back({x, y});
  }
  std::span<const LabeledPoint> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  // Replaces stored features in place (rewards are immutable).
  void set_features(std::size_t i, const FeatureVector& x) { points_.at(i).x = x; }

 private:
  std::vector<LabeledPoint> points_;
};

struct KnnConfig {
  std::size_t k = 5;
  double epsilon = 1e-6;     // distance floor in the weighted estimate
  bool normalized = false;   // sum(y/D) / sum(1/D) instead of (1/k) sum(y/D)
};

struct Neighbor {
  std::size_t index = 0;  // position in the point set
  double y = 0.0;
  double distance = 0.0;
};

/// The min(k, |points|) points closest to x in Euclidean distance, ordered
/// by (distance, insertion index).
inline std::vector<Neighbor> knn_set(std::span<const LabeledPoint> points, const FeatureVector& x, std::size_t k) {
  if (points.empty()) throw EmptyHistory("k-NN query on an empty point set");
  if (k == 0) throw InvalidParams("k must be positive");
  const std::size_t keep = std::min(k, points.size());
  std::vector<Neighbor> best;
  best.reserve(keep + 1);
  // Squared distance of the current worst kept point. sqrt is monotone, so
  // d2 >= worst_sq implies sqrt(d2) >= worst, and a later point loses ties.
  double worst_sq = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d2 = squared_distance(x, points[i].x);
    if (best.size() == keep && d2 >= worst_sq) continue;
    const double d = std::sqrt(d2);
    if (best.size() == keep && !(d < best.back().distance)) continue;
    // Insert after any equal distance so earlier points win ties.
    auto pos = std::upper_bound(best.begin(), best.end(), d,
                                [](double value, const Neighbor& n) { return value < n.distance; });
    best.insert(pos, Neighbor{i, points[i].y, d});
    if (best.size() > keep) best.pop_back();
    if (best.size() == keep) worst_sq = squared_distance(x, points[best.back().index].x);
  }
  return best;
}

/// Exact k-NN index over a fixed point set (bucketed k-d tree with
/// bounding boxes). query() returns exactly what knn_set() returns,
/// including the insertion-order tie rule.
class KnnIndex {
 public:
  explicit KnnIndex(std::span<const LabeledPoint> points) : points_(points) {
    order_.resize(points.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    if (!points.empty()) build(0, order_.size());
  }

  std::size_t size() const noexcept { return points_.size(); }

  std::vector<Neighbor> query(const FeatureVector& x, std::size_t k) const {
    if (points_.empty()) throw EmptyHistory("k-NN query on an empty point set");
    if (k == 0) throw InvalidParams("k must be positive");
    Search s{x, std::min(k, points_.size()), {}, 0.0};
    s.best.reserve(s.keep + 1);
    visit(0, s);
    std::vector<Neighbor> out;
    out.reserve(s.best.size());
    for (const auto& c : s.best) out.push_back({c.index, points_[c.index].y, c.distance});
    return out;
  }

 private:
  static constexpr std::size_t kLeafSize = 8;

  struct Node {
    std::size_t begin, end;           // range in order_
    std::size_t left = 0, right = 0;  // child node ids; 0 = leaf
    FeatureVector lo, hi;             // bounding box
  };

  struct Candidate {
    std::size_t index;
    double distance;
  };

  struct Search {
    const FeatureVector& x;
    std::size_t keep;
    std::vector<Candidate> best;  // sorted by (distance, index)
    double worst;
  };

  std::size_t build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back(Node{begin, end, 0, 0, {}, {}});
    FeatureVector lo = points_[order_[begin]].x;
    FeatureVector hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      const auto& p = points_[order_[i]].x;
      for (std::size_t d = 0; d < kFeatureDim; ++d) {
        lo[d] = std::min(lo[d], p[d]);
        hi[d] = std::max(hi[d], p[d]);
      }
    }
    nodes_[id].lo = lo;
    nodes_[id].hi = hi;
    if (end - begin <= kLeafSize) return id;
    std::size_t axis = 0;
    for (std::size_t d = 1; d < kFeatureDim; ++d) {
      if (hi[d] - lo[d] > hi[axis] - lo[axis]) axis = d;
    }
    if (!(hi[axis] > lo[axis])) return id;  // all points identical
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin), order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return points_[a].x[axis] < points_[b].x[axis]; });
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  // Lower bound on the squared distance from x to any point in the box. Each
  // term is <= the matching term of any contained point (rounding is
  // monotone), and the sum is taken in the same order, so the bound holds
  // exactly in floating point.
  static double box_squared(const FeatureVector& x, const Node& n) {
    double sum = 0.0;
    for (std::size_t d = 0; d < kFeatureDim; ++d) {
      double gap = 0.0;
      if (x[d] < n.lo[d]) gap = n.lo[d] - x[d];
      else if (x[d] > n.hi[d]) gap = x[d] - n.hi[d];
      sum += gap * gap;
    }
    return sum;
  }

  void offer(Search& s, std::size_t index) const {
    const double d2 = squared_distance(s.x, points_[index].x);
    const bool full = s.best.size() == s.keep;
    const double d = std::sqrt(d2);
    const auto before = [](const Candidate& a, double dist, std::size_t idx) {
      return a.distance < dist || (a.distance == dist && a.index < idx);
    };
    if (full && !before({index, d}, s.best.back().distance, s.best.back().index)) return;
    auto pos = std::lower_bound(s.best.begin(), s.best.end(), index,
                                [&](const Candidate& a, std::size_t idx) { return before(a, d, idx); });
    s.best.insert(pos, Candidate{index, d});
    if (s.best.size() > s.keep) s.best.pop_back();
    if (s.best.size() == s.keep) s.worst = s.best.back().distance;
  }

  void visit(std::size_t id, Search& s) const {
    const Node& n = nodes_[id];
    // Equal bounds may still hide an earlier-inserted tie, so only a strictly
    // larger bound prunes.
    if (s.best.size() == s.keep && std::sqrt(box_squared(s.x, n)) > s.worst) return;
    if (n.left == 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) offer(s, order_[i]);
      return;
    }
    const double dl = box_squared(s.x, nodes_[n.left]);
    const double dr = box_squared(s.x, nodes_[n.right]);
    if (dl <= dr) {
      visit(n.left, s);
      visit(n.right, s);
    } else {
      visit(n.right, s);
      visit(n.left, s);
    }
  }

  std::span<const LabeledPoint> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

struct KnnSummary {
  double estimate = 0.0;
  double uncertainty = 0.0;
};

/// Weighted k-NN reward estimate and mean neighbor distance, evaluated on
/// one shared neighbor set. k in the 1/k factors is the number of
/// neighbors actually used.
inline KnnSummary summarize_neighbors(std::span<const Neighbor> nbrs, const KnnConfig& cfg) {
  double weighted = 0.0;
  double inv_sum = 0.0;
  double dist_sum = 0.0;
  for (const auto& n : nbrs) {
    const double d = std::max(n.distance, cfg.epsilon);
    weighted += n.y / d;
    inv_sum += 1.0 / d;
    dist_sum += n.distance;
  }
  const auto count = static_cast<double>(nbrs.size());
  return {cfg.normalized ? weighted / inv_sum : weighted / count, dist_sum / count};
}

inline KnnSummary knn_summary(std::span<const LabeledPoint> points, const FeatureVector& x, const KnnConfig& cfg) {
  const auto nbrs = knn_set(points, x, cfg.k);
  return summarize_neighbors(nbrs, cfg);
}

inline double estimate(std::span<const LabeledPoint> points, const FeatureVector& x, const KnnConfig& cfg) {
  return knn_summary(points, x, cfg).estimate;
}

inline double uncertainty(std::span<const LabeledPoint> points, const FeatureVector& x, const KnnConfig& cfg) {
  return knn_summary(points, x, cfg).uncertainty;
}

}  // namespace netexplore
