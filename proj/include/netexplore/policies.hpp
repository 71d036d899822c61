#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "netexplore/errors.hpp"
#include "netexplore/exploration.hpp"
#include "netexplore/features.hpp"
#include "netexplore/knn.hpp"
#include "netexplore/rng.hpp"

namespace netexplore {

enum class PolicyKind { IknnUcb, KnnGreedy, KnnEpsGreedy, LinUcb, Mod, Random };

inline std::string_view to_string(PolicyKind kind) noexcept {
  switch (kind) {
    case PolicyKind::IknnUcb: return "iknn_ucb";
    case PolicyKind::KnnGreedy: return "knn_greedy";
    case PolicyKind::KnnEpsGreedy: return "knn_eps_greedy";
    case PolicyKind::LinUcb: return "lin_ucb";
    case PolicyKind::Mod: return "mod";
    case PolicyKind::Random: return "random";
  }
  return "?";
}

inline PolicyKind parse_policy_kind(std::string_view name) {
  for (auto k : {PolicyKind::IknnUcb, PolicyKind::KnnGreedy, PolicyKind::KnnEpsGreedy, PolicyKind::LinUcb,
                 PolicyKind::Mod, PolicyKind::Random}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidParams("unknown policy '" + std::string(name) + "'");
}

struct PolicyConfig {
  PolicyKind kind = PolicyKind::IknnUcb;
  double alpha = 1.0;             // UCB exploration weight
  std::size_t k = 5;              // neighbors in the k-NN model
  double epsilon_greedy = 0.1;    // random-arm probability for KnnEpsGreedy
  std::size_t warmup_T0 = 10;     // uniformly random probes before the model engages
  double lin_reg_lambda = 1.0;    // ridge term of Lin-UCB
  std::uint64_t seed = 0;
  double knn_epsilon = 1e-6;      // distance floor of the weighted estimate
  bool normalized_estimate = false;
  // Recompute the features of every past probe against the current
  // observed graph before each model query (experimental).
  bool refresh_history_features = false;

  KnnConfig knn() const { return {k, knn_epsilon, normalized_estimate}; }

  void validate() const {
    if (!(alpha >= 0.0)) throw InvalidParams("alpha must be non-negative");
    if (k < 1) throw InvalidParams("k must be at least 1");
    if (!(epsilon_greedy >= 0.0 && epsilon_greedy <= 1.0)) throw InvalidParams("epsilon_greedy must lie in [0, 1]");
    if (!(lin_reg_lambda > 0.0)) throw InvalidParams("lin_reg_lambda must be positive");
    if (!(knn_epsilon > 0.0)) throw InvalidParams("knn_epsilon must be positive");
  }
};

struct ScoredCandidate {
  NodeId node{};
  double score = 0.0;
};

/// Highest score; ties go to the smallest node id.
inline NodeId argmax_smallest_id(std::span<const ScoredCandidate> scored) {
  if (scored.empty()) throw NoCandidates("nothing to choose from");
  const ScoredCandidate* best = &scored.front();
  for (const auto& s : scored) {
    if (s.score > best->score || (s.score == best->score && s.node < best->node)) best = &s;
  }
  return best->node;
}

namespace detail {

struct FeatureBitsHash {
  std::size_t operator()(const FeatureVector& f) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : f.values) h = mix_seed(h ^ std::bit_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

struct FeatureBitsEqual {
  bool operator()(const FeatureVector& a, const FeatureVector& b) const noexcept {
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
      if (std::bit_cast<std::uint64_t>(a.values[i]) != std::bit_cast<std::uint64_t>(b.values[i])) return false;
    }
    return true;
  }
};

// Scores each distinct feature vector once; candidates revealed by the same
// probe often share identical features.
template <typename ScoreFn>
std::vector<ScoredCandidate> score_distinct(std::span<const CandidateFeatures> candidates, ScoreFn score) {
  std::unordered_map<FeatureVector, double, FeatureBitsHash, FeatureBitsEqual> cache;
  cache.reserve(candidates.size());
  std::vector<ScoredCandidate> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    auto [it, inserted] = cache.try_emplace(c.x, 0.0);
    if (inserted) it->second = score(c.x);
    out.push_back({c.node, it->second});
  }
  return out;
}

}  // namespace detail

/// k-NN upper confidence bound of every candidate: f_hat(x) + alpha * sigma(x),
/// with f_hat the distance-weighted k-NN reward estimate and sigma the mean
/// distance to the same k neighbors.
inline std::vector<ScoredCandidate> ucb_scores_iknn(std::span<const CandidateFeatures> candidates,
                                                    std::span<const LabeledPoint> history, const KnnConfig& cfg,
                                                    double alpha) {
  if (history.empty()) throw EmptyHistory("UCB scores need at least one labeled probe");
  const KnnIndex index(history);
  return detail::score_distinct(candidates, [&](const FeatureVector& x) {
    const auto s = summarize_neighbors(index.query(x, cfg.k), cfg);
    return s.estimate + alpha * s.uncertainty;
  });
}

/// Ridge-regression state of Lin-UCB: A = lambda I + sum x x^T, b = sum r x.
class LinUcbState {
 public:
  using Matrix = Eigen::Matrix<double, kFeatureDim, kFeatureDim>;
  using Vector = Eigen::Matrix<double, kFeatureDim, 1>;

  explicit LinUcbState(double lambda) : gram_(Matrix::Identity() * lambda), response_(Vector::Zero()) {
    if (!(lambda > 0.0)) throw InvalidParams("ridge lambda must be positive");
  }

  static Vector to_vector(const FeatureVector& x) { return Vector(x.values.data()); }

  void update(const FeatureVector& x, double reward) {
    const Vector v = to_vector(x);
    gram_ += v * v.transpose();
    response_ += reward * v;
  }

  const Matrix& gram() const noexcept { return gram_; }
  const Vector& response() const noexcept { return response_; }

  Eigen::LDLT<Matrix> factor() const {
    Eigen::LDLT<Matrix> ldlt(gram_);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || (ldlt.vectorD().array() <= 0.0).any()) {
      throw SingularGram("Lin-UCB gram matrix is not positive definite");
    }
    return ldlt;
  }

  Vector theta() const { return factor().solve(response_); }

 private:
  Matrix gram_;
  Vector response_;
};

/// argmax x^T theta + alpha * sqrt(x^T A^-1 x), ties to the smallest id.
inline std::vector<ScoredCandidate> lin_ucb_scores(const LinUcbState& lin, std::span<const CandidateFeatures> candidates,
                                                   double alpha) {
  const auto ldlt = lin.factor();
  const LinUcbState::Vector theta = ldlt.solve(lin.response());
  return detail::score_distinct(candidates, [&](const FeatureVector& f) {
    const LinUcbState::Vector x = LinUcbState::to_vector(f);
    const double width = x.dot(ldlt.solve(x));
    return x.dot(theta) + alpha * std::sqrt(std::max(width, 0.0));
  });
}

inline NodeId select_lin_ucb(const LinUcbState& lin, std::span<const CandidateFeatures> candidates, double alpha) {
  if (candidates.empty()) throw NoCandidates("Lin-UCB: no candidates");
  const auto scored = lin_ucb_scores(lin, candidates, alpha);
  return argmax_smallest_id(scored);
}

/// Maximum observed degree, ties to the smallest id.
inline NodeId select_mod(const ExplorationState& state) {
  if (state.candidates().empty()) throw NoCandidates("MOD: no candidates");
  NodeId best = *state.candidates().begin();
  std::size_t best_degree = state.observed_neighbors(best).size();
  for (NodeId v : state.candidates()) {
    const std::size_t d = state.observed_neighbors(v).size();
    if (d > best_degree) {
      best = v;
      best_degree = d;
    }
  }
  return best;
}

// How the last selection was made.
enum class Decision { WarmUp, RandomArm, Model };

/// Node-selection strategy. select() applies the shared warm-up rule (the
/// first warmup_T0 steps, or any step with an empty probe history, pick a
/// uniformly random candidate) and otherwise defers to the policy's rule.
class Policy {
 public:
  explicit Policy(PolicyConfig cfg, FeatureOptions features = {}) : cfg_(cfg), features_(features) { cfg_.validate(); }
  virtual ~Policy() = default;

  const PolicyConfig& config() const noexcept { return cfg_; }
  Decision last_decision() const noexcept { return last_; }

  // Whether select() needs the candidates' feature vectors. When false an
  // empty span may be passed.
  virtual bool uses_features() const noexcept = 0;

  NodeId select(const ExplorationState& state, std::span<const CandidateFeatures> candidates, Rng& rng) {
    if (state.candidates().empty()) throw NoCandidates("no candidates left to probe");
    if (uses_features() && candidates.size() != state.candidates().size()) {
      throw InvalidParams("candidate feature list does not match the candidate set");
    }
    const std::size_t t = state.step() + 1;
    if (t <= cfg_.warmup_T0 || state.history().empty()) {
      last_ = Decision::WarmUp;
      return uniform_candidate(state, rng);
    }
    return choose(state, candidates, rng);
  }

  // Called once after every probe, including warm-up probes.
  virtual void observe(const ProbeRecord&) {}

 protected:
  virtual NodeId choose(const ExplorationState& state, std::span<const CandidateFeatures> candidates, Rng& rng) = 0;

  static NodeId uniform_candidate(const ExplorationState& state, Rng& rng) {
    const auto& cands = state.candidates();
    auto it = cands.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(rng.uniform_index(cands.size())));
    return *it;
  }

  PolicyConfig cfg_;
  FeatureOptions features_;
  Decision last_ = Decision::WarmUp;
};

class RandomPolicy final : public Policy {
 public:
  using Policy::Policy;
  bool uses_features() const noexcept override { return false; }

 protected:
  NodeId choose(const ExplorationState& state, std::span<const CandidateFeatures>, Rng& rng) override {
    last_ = Decision::RandomArm;
    return uniform_candidate(state, rng);
  }
};

class ModPolicy final : public Policy {
 public:
  using Policy::Policy;
  bool uses_features() const noexcept override { return false; }

 protected:
  NodeId choose(const ExplorationState& state, std::span<const CandidateFeatures>, Rng&) override {
    last_ = Decision::Model;
    return select_mod(state);
  }
};

/// iKNN-UCB, KNN-greedy (alpha forced to 0) and KNN-epsilon-greedy share one
/// k-NN model trained on the probe history.
class KnnPolicy final : public Policy {
 public:
  using Policy::Policy;
  bool uses_features() const noexcept override { return true; }

  std::span<const LabeledPoint> training_points() const noexcept { return points_.points(); }

 protected:
  NodeId choose(const ExplorationState& state, std::span<const CandidateFeatures> candidates, Rng& rng) override {
    sync(state);
    if (cfg_.kind == PolicyKind::KnnEpsGreedy && rng.bernoulli(cfg_.epsilon_greedy)) {
      last_ = Decision::RandomArm;
      return uniform_candidate(state, rng);
    }
    last_ = Decision::Model;
    const double alpha = cfg_.kind == PolicyKind::IknnUcb ? cfg_.alpha : 0.0;
    const auto scored = ucb_scores_iknn(candidates, points_.points(), cfg_.knn(), alpha);
    return argmax_smallest_id(scored);
  }

 private:
  void sync(const ExplorationState& state) {
    const auto& history = state.history();
    for (std::size_t i = points_.size(); i < history.size(); ++i) {
      points_.append(history[i].features, static_cast<double>(history[i].reward));
    }
    if (cfg_.refresh_history_features) {
      std::vector<double> scratch;
      for (std::size_t i = 0; i < history.size(); ++i) {
        points_.set_features(i, detail::features_of_known(state, history[i].node, features_, scratch));
      }
    }
  }

  LabeledPointSet points_;
};

class LinUcbPolicy final : public Policy {
 public:
  explicit LinUcbPolicy(PolicyConfig cfg, FeatureOptions features = {})
      : Policy(cfg, features), lin_(cfg.lin_reg_lambda) {}
  bool uses_features() const noexcept override { return true; }
  void observe(const ProbeRecord& rec) override { lin_.update(rec.features, static_cast<double>(rec.reward)); }
  const LinUcbState& state() const noexcept { return lin_; }

 protected:
  NodeId choose(const ExplorationState&, std::span<const CandidateFeatures> candidates, Rng&) override {
    last_ = Decision::Model;
    return select_lin_ucb(lin_, candidates, cfg_.alpha);
  }

 private:
  LinUcbState lin_;
};

inline std::unique_ptr<Policy> make_policy(const PolicyConfig& cfg, const FeatureOptions& features = {}) {
  switch (cfg.kind) {
    case PolicyKind::Random: return std::make_unique<RandomPolicy>(cfg, features);
    case PolicyKind::Mod: return std::make_unique<ModPolicy>(cfg, features);
    case PolicyKind::LinUcb: return std::make_unique<LinUcbPolicy>(cfg, features);
    case PolicyKind::IknnUcb:
    case PolicyKind::KnnGreedy:
    case PolicyKind::KnnEpsGreedy: return std::make_unique<KnnPolicy>(cfg, features);
  }
  throw InvalidParams("unknown policy kind");
}

}  // namespace netexplore
