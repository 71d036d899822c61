#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace netexplore {

inline constexpr std::size_t kFeatureDim = 4;

/// Structural descriptor of a candidate node, computed from the observed
/// graph only. With the default normalization every component lies in [0, 1].
struct FeatureVector {
  std::array<double, kFeatureDim> values{};

  double deg_centrality() const noexcept { return values[0]; }
  double neighbor_deg_mean() const noexcept { return values[1]; }
  double neighbor_deg_median() const noexcept { return values[2]; }
  double probed_neighbor_fraction() const noexcept { return values[3]; }

  double operator[](std::size_t i) const noexcept { return values[i]; }
  double& operator[](std::size_t i) noexcept { return values[i]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline double squared_distance(const FeatureVector& a, const FeatureVector& b) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    const double d = a.values[i] - b.values[i];
    sum += d * d;
  }
  return sum;
}

inline double euclidean_distance(const FeatureVector& a, const FeatureVector& b) noexcept {
  return std::sqrt(squared_distance(a, b));
}

}  // namespace netexplore
