#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "netexplore/errors.hpp"
#include "netexplore/graph.hpp"
#include "netexplore/rng.hpp"

namespace netexplore {

struct BaParams {
  std::size_t n = 0;
  std::size_t m = 1;
  std::size_t m0 = 0;  // seed clique size; 0 means m
  std::uint64_t seed = 0;

  std::size_t seed_size() const noexcept { return m0 == 0 ? m : m0; }
};

/// Expected edge count of generate_ba: the seed clique plus m edges per
/// attached node.
inline std::size_t ba_edge_count(const BaParams& p) {
  const std::size_t s = p.seed_size();
  return s * (s - 1) / 2 + p.m * (p.n - s);
}

/// Barabasi-Albert preferential attachment. Starts from a complete graph on
/// m0 nodes; every later node links to m distinct earlier nodes chosen with
/// probability proportional to their current degree (uniformly while all
/// degrees are zero, which only happens for m0 = 1).
inline GroundTruthGraph generate_ba(const BaParams& p) {
  const std::size_t m0 = p.seed_size();
  if (p.m < 1 || p.m > m0 || m0 >= p.n) {
    throw InvalidParams("BA requires 1 <= m <= m0 < n (m=" + std::to_string(p.m) +
                        ", m0=" + std::to_string(m0) + ", n=" + std::to_string(p.n) + ")");
  }
  if (p.n > UINT32_MAX) throw InvalidParams("BA node count exceeds id range");

  Rng rng(p.seed);
  std::vector<Edge> edges;
  edges.reserve(ba_edge_count(p));
  // Each endpoint occurrence; sampling an entry is degree-proportional.
  std::vector<NodeId> endpoints;
  endpoints.reserve(2 * ba_edge_count(p));

  for (NodeId u = 0; u < m0; ++u) {
    for (NodeId v = u + 1; v < m0; ++v) {
      edges.emplace_back(u, v);
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }

  std::vector<NodeId> targets;
  targets.reserve(p.m);
  for (std::size_t i = m0; i < p.n; ++i) {
    const auto node = static_cast<NodeId>(i);
    targets.clear();
    while (targets.size() < p.m) {
      const NodeId t = endpoints.empty() ? static_cast<NodeId>(rng.uniform_index(i))
                                         : endpoints[rng.uniform_index(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (NodeId t : targets) {
      edges.emplace_back(t, node);
      endpoints.push_back(t);
      endpoints.push_back(node);
    }
  }
  return GroundTruthGraph::from_edges(p.n, edges);
}

struct LfrParams {
  std::size_t n = 0;
  double avg_degree = 25.0;
  std::size_t max_degree = 0;  // 0 means n / 10
  double gamma = 3.0;
  double beta = 1.3;
  double mu = 0.1;
  std::uint64_t seed = 0;
  std::size_t min_community = 0;  // 0 means the minimum sampled degree
  std::size_t max_community = 0;  // 0 means max_degree

  std::size_t effective_max_degree() const noexcept { return max_degree == 0 ? n / 10 : max_degree; }
};

namespace detail {

/// Discrete power law p(k) ~ k^-exponent on [lo, hi], sampled by inverse CDF.
class TruncatedPowerLaw {
 public:
  TruncatedPowerLaw(std::size_t lo, std::size_t hi, double exponent) : lo_(lo) {
    cdf_.reserve(hi - lo + 1);
    double acc = 0.0;
    double weighted = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) {
      const double w = std::pow(static_cast<double>(k), -exponent);
      acc += w;
      weighted += w * static_cast<double>(k);
      cdf_.push_back(acc);
    }
    mean_ = weighted / acc;
    for (double& c : cdf_) c /= acc;
  }

  double mean() const noexcept { return mean_; }

  std::size_t sample(Rng& rng) const {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
    return lo_ + idx;
  }

 private:
  std::size_t lo_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
};

inline std::uint64_t edge_key(NodeId u, NodeId v) noexcept {
  const auto [a, b] = canonical_edge(u, v);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// floor(x) plus a Bernoulli draw on the fractional part; unbiased rounding.
inline std::size_t stochastic_round(double x, Rng& rng) {
  const double f = std::floor(x);
  return static_cast<std::size_t>(f) + (rng.bernoulli(x - f) ? 1 : 0);
}

/// Pairs stubs by random matching under `valid`, then repairs rejected pairs
/// by rewiring against already placed edges (degree preserving). Returns the
/// number of stubs that could not be placed.
template <typename Valid>
std::size_t match_stubs(std::vector<NodeId> stubs, Valid valid, std::vector<Edge>& placed,
                        std::unordered_set<std::uint64_t>& edge_set, Rng& rng, std::size_t passes) {
  const std::size_t first_placed = placed.size();
  auto try_add = [&](NodeId a, NodeId b) {
    if (a == b || !valid(a, b) || edge_set.contains(edge_key(a, b))) return false;
    edge_set.insert(edge_key(a, b));
    placed.emplace_back(a, b);
    return true;
  };

  for (std::size_t pass = 0; pass < passes && stubs.size() >= 2; ++pass) {
    rng.shuffle(std::span<NodeId>(stubs));
    std::vector<NodeId> rejected;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      if (!try_add(stubs[i], stubs[i + 1])) {
        rejected.push_back(stubs[i]);
        rejected.push_back(stubs[i + 1]);
      }
    }
    if (stubs.size() % 2 == 1) rejected.push_back(stubs.back());
    if (rejected.size() == stubs.size() && pass > 0) {
      // Plain rematching stalled; rewire each rejected pair against a
      // random edge placed by this matching.
      std::vector<NodeId> still;
      for (std::size_t i = 0; i + 1 < rejected.size(); i += 2) {
        const NodeId a = rejected[i];
        const NodeId b = rejected[i + 1];
        bool done = false;
        const std::size_t pool = placed.size() - first_placed;
        for (int attempt = 0; attempt < 32 && pool > 0 && !done; ++attempt) {
          const std::size_t idx = first_placed + rng.uniform_index(pool);
          const auto [c, d] = placed[idx];
          for (int flip = 0; flip < 2 && !done; ++flip) {
            const NodeId x = flip ? d : c;
            const NodeId y = flip ? c : d;
            if (a == x || b == y || !valid(a, x) || !valid(b, y)) continue;
            const auto k1 = edge_key(a, x);
            const auto k2 = edge_key(b, y);
            if (k1 == k2 || edge_set.contains(k1) || edge_set.contains(k2)) continue;
            edge_set.erase(edge_key(c, d));
            edge_set.insert(k1);
            edge_set.insert(k2);
            placed[idx] = {a, x};
            placed.emplace_back(b, y);
            done = true;
          }
        }
        if (!done) {
          still.push_back(a);
          still.push_back(b);
        }
      }
      if (rejected.size() % 2 == 1) still.push_back(rejected.back());
      rejected = std::move(still);
    }
    stubs = std::move(rejected);
  }
  return stubs.size();
}

}  // namespace detail

/// Realized mixing: fraction of edges whose endpoints lie in different
/// communities.
inline double mixing_fraction(const GroundTruthGraph& g) {
  const auto& labels = g.community_labels();
  if (!labels || g.edge_count() == 0) return 0.0;
  std::size_t external = 0;
  for (const auto& [u, v] : g.edges()) external += (*labels)[u] != (*labels)[v];
  return static_cast<double>(external) / static_cast<double>(g.edge_count());
}

/// Configuration-model variant of the LFR benchmark.
///
/// Degrees follow a truncated power law (exponent gamma) whose lower cutoff
/// is chosen so the mean lands on avg_degree; community sizes follow a power
/// law with exponent beta. Each node splits its degree into an external
/// share mu and an internal share 1 - mu; internal stubs are matched within
/// the node's community and external stubs across communities.
inline GroundTruthGraph generate_lfr(const LfrParams& p) {
  const std::size_t kmax = p.effective_max_degree();
  if (!(p.mu > 0.0 && p.mu < 1.0)) throw InvalidParams("LFR requires 0 < mu < 1");
  if (!(p.gamma > 1.0)) throw InvalidParams("LFR requires gamma > 1");
  if (!(p.beta > 1.0)) throw InvalidParams("LFR requires beta > 1");
  if (!(p.avg_degree > 0.0) || p.avg_degree > static_cast<double>(kmax) || kmax >= p.n) {
    throw InvalidParams("LFR requires 0 < avg_degree <= max_degree < n");
  }
  if (p.n > UINT32_MAX) throw InvalidParams("LFR node count exceeds id range");

  Rng rng(p.seed);
  const std::size_t n = p.n;

  // (i) degrees. Largest integer lower cutoff whose mean stays <= target,
  // then a multiplicative rescale with unbiased rounding.
  std::size_t kmin = 1;
  {
    std::size_t lo = 1, hi = kmax;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo + 1) / 2;
      if (detail::TruncatedPowerLaw(mid, kmax, p.gamma).mean() <= p.avg_degree) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    kmin = lo;
  }
  const detail::TruncatedPowerLaw degree_law(kmin, kmax, p.gamma);
  std::vector<std::size_t> degree(n);
  for (auto& d : degree) d = degree_law.sample(rng);
  for (int round = 0; round < 4; ++round) {
    const double mean = std::accumulate(degree.begin(), degree.end(), 0.0) / static_cast<double>(n);
    if (std::abs(mean - p.avg_degree) <= 0.005 * p.avg_degree) break;
    const double factor = p.avg_degree / mean;
    for (auto& d : degree) {
      d = std::clamp<std::size_t>(detail::stochastic_round(static_cast<double>(d) * factor, rng), 1, kmax);
    }
  }
  if (std::accumulate(degree.begin(), degree.end(), std::size_t{0}) % 2 == 1) {
    for (;;) {
      auto& d = degree[rng.uniform_index(n)];
      if (d < kmax) {
        ++d;
        break;
      }
    }
  }

  std::vector<std::size_t> external(n);
  std::vector<std::size_t> internal(n);
  for (std::size_t v = 0; v < n; ++v) {
    external[v] = std::min(degree[v], detail::stochastic_round(p.mu * static_cast<double>(degree[v]), rng));
    internal[v] = degree[v] - external[v];
  }
  const std::size_t max_internal = *std::max_element(internal.begin(), internal.end());

  // (ii) community sizes covering exactly n nodes.
  const std::size_t cmin = std::max<std::size_t>(p.min_community == 0 ? kmin : p.min_community, 2);
  const std::size_t cmax = std::min(
      n, std::max({p.max_community == 0 ? kmax : p.max_community, max_internal + 1, cmin}));
  const detail::TruncatedPowerLaw size_law(cmin, cmax, p.beta);
  std::vector<std::size_t> sizes;
  std::size_t covered = 0;
  while (covered < n) {
    sizes.push_back(size_law.sample(rng));
    covered += sizes.back();
  }
  if (covered > n) {
    const std::size_t excess = covered - n;
    if (sizes.back() > excess && sizes.back() - excess >= cmin) {
      sizes.back() -= excess;
    } else {
      covered -= sizes.back();
      sizes.pop_back();
      for (std::size_t left = n - covered; left > 0; --left) ++sizes[rng.uniform_index(sizes.size())];
    }
  }
  if (sizes.size() < 2) throw GenerationFailed("LFR needs at least two communities; lower max_community");

  // (iii) membership: most demanding nodes first, each into a community
  // large enough for its internal degree, weighted by free slots.
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  rng.shuffle(std::span<NodeId>(order));
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return internal[a] > internal[b]; });
  std::vector<std::size_t> free_slots = sizes;
  std::vector<int> label(n, -1);
  std::vector<double> weights(sizes.size());
  for (NodeId v : order) {
    double total = 0.0;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      weights[c] = (free_slots[c] > 0 && sizes[c] > internal[v]) ? static_cast<double>(free_slots[c]) : 0.0;
      total += weights[c];
    }
    std::size_t chosen = 0;
    if (total > 0.0) {
      double u = rng.uniform01() * total;
      chosen = sizes.size() - 1;
      for (std::size_t c = 0; c < sizes.size(); ++c) {
        if (u < weights[c]) {
          chosen = c;
          break;
        }
        u -= weights[c];
      }
      while (weights[chosen] == 0.0) --chosen;
    } else {
      // No community fits: take the largest with space and cap the
      // internal share.
      std::size_t best_size = 0;
      for (std::size_t c = 0; c < sizes.size(); ++c) {
        if (free_slots[c] > 0 && sizes[c] > best_size) {
          best_size = sizes[c];
          chosen = c;
        }
      }
      const std::size_t cap = best_size - 1;
      external[v] += internal[v] - cap;
      internal[v] = cap;
    }
    label[v] = static_cast<int>(chosen);
    --free_slots[chosen];
  }

  // (iv) wiring.
  std::vector<std::vector<NodeId>> members(sizes.size());
  for (NodeId v = 0; v < n; ++v) members[static_cast<std::size_t>(label[v])].push_back(v);

  std::vector<Edge> edges;
  edges.reserve(std::accumulate(degree.begin(), degree.end(), std::size_t{0}) / 2);
  std::unordered_set<std::uint64_t> edge_set;
  edge_set.reserve(edges.capacity() * 2);
  constexpr std::size_t kPasses = 64;
  std::size_t total_stubs = 0;
  std::size_t unplaced = 0;

  for (const auto& group : members) {
    std::vector<NodeId> stubs;
    for (NodeId v : group) stubs.insert(stubs.end(), internal[v], v);
    if (stubs.size() % 2 == 1) {
      // Move one stub of a random member to the external pool.
      const NodeId v = stubs[rng.uniform_index(stubs.size())];
      --internal[v];
      ++external[v];
      stubs.erase(std::find(stubs.begin(), stubs.end(), v));
    }
    total_stubs += stubs.size();
    unplaced += detail::match_stubs(
        std::move(stubs), [](NodeId, NodeId) { return true; }, edges, edge_set, rng, kPasses);
  }

  std::vector<NodeId> ext_stubs;
  for (NodeId v = 0; v < n; ++v) ext_stubs.insert(ext_stubs.end(), external[v], v);
  total_stubs += ext_stubs.size();
  unplaced += detail::match_stubs(
      std::move(ext_stubs), [&](NodeId a, NodeId b) { return label[a] != label[b]; }, edges, edge_set,
      rng, kPasses);

  if (total_stubs > 0 && static_cast<double>(unplaced) > 0.01 * static_cast<double>(total_stubs)) {
    throw GenerationFailed("LFR matching left " + std::to_string(unplaced) + " of " +
                           std::to_string(total_stubs) + " stubs unplaced");
  }

  auto graph = GroundTruthGraph::from_edges(n, edges, std::move(label));
  const double realized = mixing_fraction(graph);
  if (std::abs(realized - p.mu) > 0.05) {
    throw GenerationFailed("LFR realized mixing " + std::to_string(realized) + " too far from mu");
  }
  return graph;
}

}  // namespace netexplore
