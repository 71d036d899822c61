#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "netexplore/errors.hpp"
#include "netexplore/exploration.hpp"
#include "netexplore/feature_vector.hpp"

namespace netexplore {

struct FeatureOptions {
  // Degree centrality = observed degree / (|V'_t| - 1). When false the raw
  // observed degree is used and components 0-2 are no longer bounded by 1.
  bool normalize_degree = true;
  // z-score every component across the current candidate set.
  bool standardize = false;
};

struct CandidateFeatures {
  NodeId node{};
  FeatureVector x{};
};

namespace detail {

// Feature rule for any known node; callers enforce the status contract.
inline FeatureVector features_of_known(const ExplorationState& state, NodeId node, const FeatureOptions& opts,
                                       std::vector<double>& scratch) {
  FeatureVector f;
  const auto nbrs = state.observed_neighbors(node);
  if (nbrs.empty()) return f;
  double scale = 1.0;
  if (opts.normalize_degree) {
    const std::size_t others = state.observed_count() - 1;
    if (others == 0) return f;
    scale = 1.0 / static_cast<double>(others);
  }
  scratch.clear();
  std::size_t probed = 0;
  double sum = 0.0;
  for (NodeId w : nbrs) {
    const double c = static_cast<double>(state.observed_neighbors(w).size()) * scale;
    scratch.push_back(c);
    sum += c;
    probed += state.status(w) == NodeStatus::Probed;
  }
  const std::size_t k = scratch.size();
  double median;
  const auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(k / 2);
  std::nth_element(scratch.begin(), mid, scratch.end());
  if (k % 2 == 1) {
    median = *mid;
  } else {
    const double upper = *mid;
    const double lower = *std::max_element(scratch.begin(), mid);
    median = (lower + upper) / 2.0;
  }
  f.values[0] = static_cast<double>(k) * scale;
  f.values[1] = sum / static_cast<double>(k);
  f.values[2] = median;
  f.values[3] = static_cast<double>(probed) / static_cast<double>(k);
  return f;
}

inline void standardize_columns(std::span<CandidateFeatures> rows) {
  if (rows.size() < 2) return;
  for (std::size_t j = 0; j < kFeatureDim; ++j) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r.x.values[j];
    mean /= static_cast<double>(rows.size());
    double var = 0.0;
    for (const auto& r : rows) var += (r.x.values[j] - mean) * (r.x.values[j] - mean);
    const double sd = std::sqrt(var / static_cast<double>(rows.size()));
    for (auto& r : rows) r.x.values[j] = sd > 0.0 ? (r.x.values[j] - mean) / sd : 0.0;
  }
}

}  // namespace detail

/// Structural features of a candidate, computed from the observed graph alone:
/// degree centrality, mean and median degree centrality of its observed
/// neighbors, and the fraction of those neighbors already probed. A node
/// with no observed neighbors maps to the zero vector.
inline FeatureVector compute_features(const ExplorationState& state, NodeId node, const FeatureOptions& opts = {}) {
  if (state.status(node) != NodeStatus::Observed) {
    throw NodeNotCandidate("node " + std::to_string(node) + " is " + to_string(state.status(node)));
  }
  std::vector<double> scratch;
  return detail::features_of_known(state, node, opts, scratch);
}

/// Features of every current candidate, ascending by node id.
inline std::vector<CandidateFeatures> features_of_candidates(const ExplorationState& state,
                                                             const FeatureOptions& opts = {}) {
  std::vector<CandidateFeatures> out;
  out.reserve(state.candidates().size());
  std::vector<double> scratch;
  for (NodeId v : state.candidates()) out.push_back({v, detail::features_of_known(state, v, opts, scratch)});
  if (opts.standardize) detail::standardize_columns(out);
  return out;
}

/// Per-step feature dump: "step,node,deg_centrality,neighbor_deg_mean,
/// neighbor_deg_median,probed_neighbor_fraction,chosen".
class FeatureDumpWriter {
 public:
  explicit FeatureDumpWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw IoError("cannot write " + path.string());
    out_ << "step,node,deg_centrality,neighbor_deg_mean,neighbor_deg_median,probed_neighbor_fraction,chosen\n";
    out_.precision(17);
  }

  void write(std::size_t step, std::span<const CandidateFeatures> rows, NodeId chosen) {
    for (const auto& r : rows) {
      out_ << step << ',' << r.node;
      for (double v : r.x.values) out_ << ',' << v;
      out_ << ',' << (r.node == chosen ? 1 : 0) << '\n';
    }
  }

 private:
  std::ofstream out_;
};

}  // namespace netexplore
