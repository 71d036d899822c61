#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <type_traits>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "netexplore/edge_list.hpp"
#include "netexplore/errors.hpp"
#include "netexplore/exploration.hpp"
#include "netexplore/features.hpp"
#include "netexplore/generators.hpp"
#include "netexplore/policies.hpp"
#include "netexplore/rng.hpp"
#include "netexplore/sampling.hpp"

namespace netexplore {

enum class GraphKind { Ba, Lfr, File };

struct GraphSource {
  GraphKind kind = GraphKind::Ba;
  BaParams ba;
  LfrParams lfr;
  std::filesystem::path path;
  std::optional<std::filesystem::path> communities;
};

struct ExperimentConfig {
  GraphSource graph;
  SampleSpec sample;
  PolicyConfig policy;
  FeatureOptions features;
  std::size_t budget_T = 0;
  std::size_t repeats = 1;
  std::uint64_t seed = 0;  // master seed; per-repeat seeds derive from it
  bool track_regret = false;
  std::filesystem::path output_dir = ".";
  std::optional<std::filesystem::path> initial_snapshot;  // overrides sampling
  bool feature_dump = false;
  std::size_t threads = 1;  // 0 = hardware concurrency

  void validate() const {
    if (budget_T < 1) throw ConfigError("budget_T must be at least 1");
    if (repeats < 1) throw ConfigError("repeats must be at least 1");
    try {
      policy.validate();
    } catch (const InvalidParams& e) {
      throw ConfigError(e.what());
    }
    if (!(sample.fraction > 0.0 && sample.fraction <= 1.0)) throw ConfigError("sample fraction must lie in (0, 1]");
    if (graph.kind == GraphKind::File && graph.path.empty()) throw ConfigError("graph.path is required for source=file");
  }
};

// ---------------------------------------------------------------------------
// Number formatting

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError("bad number '" + std::string(s) + "'", 0);
  return v;
}

// ---------------------------------------------------------------------------
// Config files
//
//   [graph]    source = ba | lfr | file
//              n, m, m0                                  (ba)
//              n, avg_degree, max_degree, gamma, beta,
//              mu, min_community, max_community          (lfr)
//              path, communities                         (file)
//   [sample]   method = rn | bfs, fraction, edge_policy = induced | discovery,
//              snapshot (optional initial state file)
//   [policy]   kind = iknn_ucb | knn_greedy | knn_eps_greedy | lin_ucb | mod | random
//              alpha, k, t0, epsilon_greedy, lambda, knn_epsilon,
//              normalized_estimate, refresh_history_features
//   [features] normalize, standardize
//   [run]      budget, repeats, seed, track_regret, output_dir, feature_dump, threads
//
// policy.alpha, policy.k, policy.t0, policy.kind, run.seed, run.budget and
// run.track_regret have no defaults and must be given explicitly.

using ConfigTree = boost::property_tree::ptree;

inline constexpr std::string_view kRequiredConfigKeys[] = {
    "policy.kind", "policy.alpha", "policy.k", "policy.t0", "run.seed", "run.budget", "run.track_regret",
};

namespace detail {

template <typename T>
T get_value(const ConfigTree& tree, const std::string& key, T fallback) {
  const auto node = tree.get_optional<std::string>(key);
  if (!node) return fallback;
  std::string text(trim(*node));
  if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + text + "'");
  } else if constexpr (std::is_same_v<T, std::string>) {
    return text;
  } else if constexpr (std::is_floating_point_v<T>) {
    try {
      return parse_double(text);
    } catch (const ParseError&) {
      throw ConfigError(key + ": expected a number, got '" + text + "'");
    }
  } else {
    const auto v = parse_u64(text);
    if (!v) throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
    return static_cast<T>(*v);
  }
}

}  // namespace detail

inline ConfigTree read_config_tree(const std::filesystem::path& path) {
  ConfigTree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  return tree;
}

inline ConfigTree parse_config_tree(const std::string& text) {
  ConfigTree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  return tree;
}

/// Applies "section.key=value" overrides.
inline void apply_overrides(ConfigTree& tree, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || o.find('.') > eq) throw ConfigError("override must look like section.key=value: " + o);
    tree.put(o.substr(0, eq), o.substr(eq + 1));
  }
}

inline ExperimentConfig config_from_tree(const ConfigTree& tree) {
  using detail::get_value;
  std::vector<std::string> missing;
  for (auto key : kRequiredConfigKeys) {
    if (!tree.get_optional<std::string>(std::string(key))) missing.emplace_back(key);
  }
  if (!missing.empty()) {
    std::string msg = "missing required settings:";
    for (const auto& m : missing) msg += " " + m;
    throw ConfigError(msg);
  }

  ExperimentConfig cfg;
  const auto source = get_value<std::string>(tree, "graph.source", "ba");
  if (source == "ba") {
    cfg.graph.kind = GraphKind::Ba;
    cfg.graph.ba.n = get_value<std::size_t>(tree, "graph.n", 1000);
    cfg.graph.ba.m = get_value<std::size_t>(tree, "graph.m", 3);
    cfg.graph.ba.m0 = get_value<std::size_t>(tree, "graph.m0", 0);
  } else if (source == "lfr") {
    cfg.graph.kind = GraphKind::Lfr;
    auto& l = cfg.graph.lfr;
    l.n = get_value<std::size_t>(tree, "graph.n", 1000);
    l.avg_degree = get_value<double>(tree, "graph.avg_degree", 25.0);
    l.max_degree = get_value<std::size_t>(tree, "graph.max_degree", 0);
    l.gamma = get_value<double>(tree, "graph.gamma", 3.0);
    l.beta = get_value<double>(tree, "graph.beta", 1.3);
    l.mu = get_value<double>(tree, "graph.mu", 0.1);
    l.min_community = get_value<std::size_t>(tree, "graph.min_community", 0);
    l.max_community = get_value<std::size_t>(tree, "graph.max_community", 0);
  } else if (source == "file") {
    cfg.graph.kind = GraphKind::File;
    cfg.graph.path = get_value<std::string>(tree, "graph.path", "");
    if (const auto c = tree.get_optional<std::string>("graph.communities")) cfg.graph.communities = *c;
  } else {
    throw ConfigError("graph.source must be ba, lfr or file");
  }

  const auto method = get_value<std::string>(tree, "sample.method", "rn");
  if (method != "rn" && method != "bfs") throw ConfigError("sample.method must be rn or bfs");
  cfg.sample.method = method == "rn" ? SampleMethod::RN : SampleMethod::BFS;
  cfg.sample.fraction = get_value<double>(tree, "sample.fraction", 0.05);
  const auto edges = get_value<std::string>(tree, "sample.edge_policy", "induced");
  if (edges != "induced" && edges != "discovery") throw ConfigError("sample.edge_policy must be induced or discovery");
  cfg.sample.edge_policy = edges == "induced" ? EdgePolicy::InducedSubgraph : EdgePolicy::DiscoveryEdgesOnly;
  if (const auto s = tree.get_optional<std::string>("sample.snapshot")) cfg.initial_snapshot = *s;

  try {
    cfg.policy.kind = parse_policy_kind(get_value<std::string>(tree, "policy.kind", ""));
  } catch (const InvalidParams& e) {
    throw ConfigError(e.what());
  }
  cfg.policy.alpha = get_value<double>(tree, "policy.alpha", 0.0);
  cfg.policy.k = get_value<std::size_t>(tree, "policy.k", 1);
  cfg.policy.warmup_T0 = get_value<std::size_t>(tree, "policy.t0", 0);
  cfg.policy.epsilon_greedy = get_value<double>(tree, "policy.epsilon_greedy", 0.1);
  cfg.policy.lin_reg_lambda = get_value<double>(tree, "policy.lambda", 1.0);
  cfg.policy.knn_epsilon = get_value<double>(tree, "policy.knn_epsilon", 1e-6);
  cfg.policy.normalized_estimate = get_value<bool>(tree, "policy.normalized_estimate", false);
  cfg.policy.refresh_history_features = get_value<bool>(tree, "policy.refresh_history_features", false);

  cfg.features.normalize_degree = get_value<bool>(tree, "features.normalize", true);
  cfg.features.standardize = get_value<bool>(tree, "features.standardize", false);

  cfg.budget_T = get_value<std::size_t>(tree, "run.budget", 0);
  cfg.repeats = get_value<std::size_t>(tree, "run.repeats", 1);
  cfg.seed = get_value<std::uint64_t>(tree, "run.seed", 0);
  cfg.track_regret = get_value<bool>(tree, "run.track_regret", false);
  cfg.output_dir = get_value<std::string>(tree, "run.output_dir", ".");
  cfg.feature_dump = get_value<bool>(tree, "run.feature_dump", false);
  cfg.threads = get_value<std::size_t>(tree, "run.threads", 1);
  cfg.validate();
  return cfg;
}

inline ExperimentConfig parse_config(const std::string& text) { return config_from_tree(parse_config_tree(text)); }

/// Every setting that influences results, as sorted "section.key=value"
/// lines. Output location and thread count are excluded.
inline std::string canonical_config(const ExperimentConfig& c) {
  std::map<std::string, std::string> kv;
  const auto num = [](auto v) {
    if constexpr (std::is_floating_point_v<decltype(v)>) {
      return format_double(v);
    } else {
      return std::to_string(v);
    }
  };
  switch (c.graph.kind) {
    case GraphKind::Ba:
      kv["graph.source"] = "ba";
      kv["graph.n"] = num(c.graph.ba.n);
      kv["graph.m"] = num(c.graph.ba.m);
      kv["graph.m0"] = num(c.graph.ba.seed_size());
      break;
    case GraphKind::Lfr:
      kv["graph.source"] = "lfr";
      kv["graph.n"] = num(c.graph.lfr.n);
      kv["graph.avg_degree"] = num(c.graph.lfr.avg_degree);
      kv["graph.max_degree"] = num(c.graph.lfr.effective_max_degree());
      kv["graph.gamma"] = num(c.graph.lfr.gamma);
      kv["graph.beta"] = num(c.graph.lfr.beta);
      kv["graph.mu"] = num(c.graph.lfr.mu);
      kv["graph.min_community"] = num(c.graph.lfr.min_community);
      kv["graph.max_community"] = num(c.graph.lfr.max_community);
      break;
    case GraphKind::File:
      kv["graph.source"] = "file";
      kv["graph.path"] = c.graph.path.string();
      if (c.graph.communities) kv["graph.communities"] = c.graph.communities->string();
      break;
  }
  kv["sample.method"] = c.sample.method == SampleMethod::RN ? "rn" : "bfs";
  kv["sample.fraction"] = num(c.sample.fraction);
  kv["sample.edge_policy"] = c.sample.edge_policy == EdgePolicy::InducedSubgraph ? "induced" : "discovery";
  if (c.initial_snapshot) kv["sample.snapshot"] = c.initial_snapshot->string();
  kv["policy.kind"] = std::string(to_string(c.policy.kind));
  kv["policy.alpha"] = num(c.policy.alpha);
  kv["policy.k"] = num(c.policy.k);
  kv["policy.t0"] = num(c.policy.warmup_T0);
  kv["policy.epsilon_greedy"] = num(c.policy.epsilon_greedy);
  kv["policy.lambda"] = num(c.policy.lin_reg_lambda);
  kv["policy.knn_epsilon"] = num(c.policy.knn_epsilon);
  kv["policy.normalized_estimate"] = c.policy.normalized_estimate ? "true" : "false";
  kv["policy.refresh_history_features"] = c.policy.refresh_history_features ? "true" : "false";
  kv["features.normalize"] = c.features.normalize_degree ? "true" : "false";
  kv["features.standardize"] = c.features.standardize ? "true" : "false";
  kv["run.budget"] = num(c.budget_T);
  kv["run.repeats"] = num(c.repeats);
  kv["run.seed"] = num(c.seed);
  kv["run.track_regret"] = c.track_regret ? "true" : "false";
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

/// 64-bit FNV-1a of the canonical config, as 16 hex digits.
inline std::string config_fingerprint(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  for (int i = 15; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

inline std::string policy_label(const PolicyConfig& p) {
  std::string label(to_string(p.kind));
  switch (p.kind) {
    case PolicyKind::IknnUcb: label += "(alpha=" + format_double(p.alpha) + ",k=" + std::to_string(p.k) + ")"; break;
    case PolicyKind::KnnGreedy: label += "(k=" + std::to_string(p.k) + ")"; break;
    case PolicyKind::KnnEpsGreedy:
      label += "(eps=" + format_double(p.epsilon_greedy) + ",k=" + std::to_string(p.k) + ")";
      break;
    case PolicyKind::LinUcb: label += "(alpha=" + format_double(p.alpha) + ")"; break;
    case PolicyKind::Mod:
    case PolicyKind::Random: break;
  }
  return label;
}

// ---------------------------------------------------------------------------
// Runs

struct StepRecord {
  std::size_t t = 0;
  NodeId node = 0;
  std::size_t reward = 0;
  std::size_t observed = 0;  // |V'_t| after this probe
  std::optional<std::size_t> regret;
  std::optional<std::size_t> cumulative_regret;
};

struct RunSeries {
  std::string fingerprint;
  std::string label;
  std::uint64_t seed = 0;
  std::size_t initial_observed = 0;
  bool truncated = false;  // candidates ran out before the budget
  std::vector<StepRecord> steps;
};

struct RepeatSeeds {
  std::uint64_t run;
  std::uint64_t graph;
  std::uint64_t sample;
  std::uint64_t policy;
};

inline RepeatSeeds repeat_seeds(std::uint64_t master, std::size_t repeat) {
  const std::uint64_t run = derive_seed(master, repeat);
  return {run, derive_seed(run, 1), derive_seed(run, 2), derive_seed(run, 3)};
}

/// One exploration loop from a prepared initial state. Each step computes
/// candidate features (only when the policy consumes them), asks the policy,
/// optionally scores the oracle's best reward for regret, then probes.
inline RunSeries run_exploration(const GroundTruthGraph& truth, ExplorationState state, const PolicyConfig& policy_cfg,
                                 const FeatureOptions& features, std::size_t budget, bool track_regret,
                                 std::uint64_t policy_seed, FeatureDumpWriter* dump = nullptr) {
  RunSeries series;
  series.label = policy_label(policy_cfg);
  series.initial_observed = state.observed_count();
  auto policy = make_policy(policy_cfg, features);
  Rng rng(policy_seed);
  std::size_t cumulative = 0;
  std::vector<CandidateFeatures> cands;
  series.steps.reserve(budget);
  for (std::size_t t = 1; t <= budget; ++t) {
    if (state.candidates().empty()) {
      series.truncated = true;
      break;
    }
    cands.clear();
    if (policy->uses_features() || dump) cands = features_of_candidates(state, features);
    const NodeId node = policy->select(state, policy->uses_features() ? std::span<const CandidateFeatures>(cands)
                                                                      : std::span<const CandidateFeatures>{},
                                       rng);
    FeatureVector x;
    if (!cands.empty()) {
      const auto it = std::lower_bound(cands.begin(), cands.end(), node,
                                       [](const CandidateFeatures& c, NodeId v) { return c.node < v; });
      x = it->x;
    } else {
      x = compute_features(state, node, features);
    }
    if (dump) dump->write(t, cands, node);
    std::optional<std::size_t> best;
    if (track_regret) best = oracle_best_reward(state, truth).second;
    const auto result = state.probe(truth, node, x);
    policy->observe(state.history().back());
    StepRecord rec{t, node, result.reward, state.observed_count(), std::nullopt, std::nullopt};
    if (best) {
      rec.regret = *best - result.reward;
      cumulative += *rec.regret;
      rec.cumulative_regret = cumulative;
    }
    series.steps.push_back(rec);
  }
  return series;
}

namespace detail {

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace detail

inline GroundTruthGraph build_graph(const GraphSource& src, std::uint64_t seed) {
  switch (src.kind) {
    case GraphKind::Ba: {
      auto p = src.ba;
      p.seed = seed;
      return generate_ba(p);
    }
    case GraphKind::Lfr: {
      auto p = src.lfr;
      p.seed = seed;
      return generate_lfr(p);
    }
    case GraphKind::File: {
      auto loaded = load_edge_list(src.path);
      if (src.communities) load_communities(loaded, *src.communities);
      return std::move(loaded.graph);
    }
  }
  throw ConfigError("unknown graph source");
}

/// Runs every repeat of an experiment. Generated graphs are rebuilt per
/// repeat from that repeat's seed; a file graph is loaded once and shared.
inline std::vector<RunSeries> run(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::string fingerprint = config_fingerprint(cfg);
  std::optional<GroundTruthGraph> shared;
  if (cfg.graph.kind == GraphKind::File) shared = build_graph(cfg.graph, 0);

  auto one = [&](std::size_t r) {
    const auto seeds = repeat_seeds(cfg.seed, r);
    std::optional<GroundTruthGraph> own;
    if (!shared) own = build_graph(cfg.graph, seeds.graph);
    const GroundTruthGraph& truth = shared ? *shared : *own;
    SampleSpec spec = cfg.sample;
    spec.seed = seeds.sample;
    ExplorationState initial = cfg.initial_snapshot ? read_snapshot(*cfg.initial_snapshot, &truth) : sample(truth, spec);
    std::optional<FeatureDumpWriter> dump;
    if (cfg.feature_dump) {
      detail::ensure_directory(cfg.output_dir);
      dump.emplace(cfg.output_dir / ("features_" + std::to_string(r) + ".csv"));
    }
    auto series = run_exploration(truth, std::move(initial), cfg.policy, cfg.features, cfg.budget_T, cfg.track_regret,
                                  seeds.policy, dump ? &*dump : nullptr);
    series.fingerprint = fingerprint;
    series.seed = seeds.run;
    return series;
  };

  std::vector<RunSeries> out(cfg.repeats);
  std::size_t threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  threads = std::min(threads, cfg.repeats);
  if (threads <= 1) {
    for (std::size_t r = 0; r < cfg.repeats; ++r) out[r] = one(r);
    return out;
  }
  // Repeats share only the immutable graph; results land in repeat order.
  for (std::size_t first = 0; first < cfg.repeats; first += threads) {
    std::vector<std::future<RunSeries>> batch;
    for (std::size_t r = first; r < std::min(cfg.repeats, first + threads); ++r) {
      batch.push_back(std::async(std::launch::async, one, r));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) out[first + i] = batch[i].get();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

struct SummaryRow {
  std::size_t step = 0;
  double mean_observed = 0.0;
  double std_observed = 0.0;
  std::optional<double> mean_regret;
  std::optional<double> std_regret;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct Summary {
  std::string fingerprint;
  std::string label;
  std::size_t runs = 0;
  std::vector<SummaryRow> rows;

  const SummaryRow* final_row() const { return rows.empty() ? nullptr : &rows.back(); }
};

namespace detail {

inline std::pair<double, double> mean_std(std::span<const double> xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

}  // namespace detail

/// Per-step mean and population standard deviation across runs. A truncated
/// run contributes its last value to every later step.
inline Summary aggregate(std::span<const RunSeries> series) {
  Summary s;
  if (series.empty()) return s;
  s.fingerprint = series.front().fingerprint;
  s.label = series.front().label;
  s.runs = series.size();
  std::size_t length = 0;
  bool regret = true;
  for (const auto& r : series) {
    if (r.fingerprint != s.fingerprint) throw MixedConfigs("series from different configs: " + s.fingerprint + " vs " + r.fingerprint);
    length = std::max(length, r.steps.size());
    for (const auto& st : r.steps) regret = regret && st.cumulative_regret.has_value();
  }
  std::vector<double> obs(series.size());
  std::vector<double> reg(series.size());
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t i = 0; i < series.size(); ++i) {
      const auto& steps = series[i].steps;
      if (steps.empty()) {
        obs[i] = static_cast<double>(series[i].initial_observed);
        reg[i] = 0.0;
      } else {
        const auto& st = steps[std::min(t, steps.size() - 1)];
        obs[i] = static_cast<double>(st.observed);
        reg[i] = regret ? static_cast<double>(*st.cumulative_regret) : 0.0;
      }
    }
    SummaryRow row;
    row.step = t + 1;
    std::tie(row.mean_observed, row.std_observed) = detail::mean_std(obs);
    if (regret) {
      const auto [m, sd] = detail::mean_std(reg);
      row.mean_regret = m;
      row.std_regret = sd;
    }
    s.rows.push_back(row);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Emission

inline constexpr std::string_view kSummaryHeader = "step,mean_observed,std_observed,mean_regret,std_regret";

/// Summary CSV. Leading '#' lines carry the fingerprint, label and run count;
/// a trailing "# final," line repeats the last step. Untracked regret
/// columns are empty.
inline std::string summary_csv(const Summary& s) {
  std::string out;
  if (!s.fingerprint.empty()) out += "# fingerprint=" + s.fingerprint + "\n";
  if (!s.label.empty()) out += "# label=" + s.label + "\n";
  if (s.runs > 0) out += "# runs=" + std::to_string(s.runs) + "\n";
  out += std::string(kSummaryHeader) + "\n";
  auto line = [](const SummaryRow& r) {
    std::string l = std::to_string(r.step) + "," + format_double(r.mean_observed) + "," + format_double(r.std_observed) + ",";
    if (r.mean_regret) l += format_double(*r.mean_regret);
    l += ",";
    if (r.std_regret) l += format_double(*r.std_regret);
    return l;
  };
  for (const auto& r : s.rows) out += line(r) + "\n";
  if (const auto* f = s.final_row()) out += "# final," + line(*f) + "\n";
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) detail::ensure_directory(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void emit_csv(const Summary& s, const std::filesystem::path& path) { write_text(path, summary_csv(s)); }

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(',', start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

inline Summary parse_summary_csv(const std::string& text) {
  Summary s;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto body = detail::trim(t.substr(1));
      if (body.starts_with("fingerprint=")) s.fingerprint = body.substr(12);
      if (body.starts_with("label=")) s.label = body.substr(6);
      if (body.starts_with("runs=")) s.runs = detail::parse_u64(body.substr(5)).value_or(0);
      continue;
    }
    if (!header) {
      if (t != kSummaryHeader) throw ParseError("unexpected summary header", lineno);
      header = true;
      continue;
    }
    const auto f = detail::split_commas(t);
    if (f.size() != 5) throw ParseError("summary rows have five fields", lineno);
    SummaryRow r;
    const auto step = detail::parse_u64(f[0]);
    if (!step) throw ParseError("bad step", lineno);
    r.step = *step;
    try {
      r.mean_observed = parse_double(f[1]);
      r.std_observed = parse_double(f[2]);
      if (!f[3].empty()) r.mean_regret = parse_double(f[3]);
      if (!f[4].empty()) r.std_regret = parse_double(f[4]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
    s.rows.push_back(r);
  }
  if (!header) throw ParseError("summary CSV has no header", lineno);
  return s;
}

/// Per-run CSV: metadata comments, then
/// "t,node,reward,observed,regret,cumulative_regret".
inline std::string series_csv(const RunSeries& r) {
  std::string out;
  out += "# fingerprint=" + r.fingerprint + "\n";
  out += "# label=" + r.label + "\n";
  out += "# seed=" + std::to_string(r.seed) + "\n";
  out += "# initial_observed=" + std::to_string(r.initial_observed) + "\n";
  out += "# truncated=" + std::string(r.truncated ? "1" : "0") + "\n";
  out += "t,node,reward,observed,regret,cumulative_regret\n";
  for (const auto& s : r.steps) {
    out += std::to_string(s.t) + "," + std::to_string(s.node) + "," + std::to_string(s.reward) + "," +
           std::to_string(s.observed) + ",";
    if (s.regret) out += std::to_string(*s.regret);
    out += ",";
    if (s.cumulative_regret) out += std::to_string(*s.cumulative_regret);
    out += "\n";
  }
  return out;
}

inline RunSeries parse_series_csv(const std::string& text) {
  RunSeries r;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  auto num = [&](std::string_view s) {
    const auto v = detail::parse_u64(s);
    if (!v) throw ParseError("bad integer '" + std::string(s) + "'", lineno);
    return *v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto body = detail::trim(t.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = body.substr(0, eq);
      const auto value = body.substr(eq + 1);
      if (key == "fingerprint") r.fingerprint = value;
      else if (key == "label") r.label = value;
      else if (key == "seed") r.seed = num(value);
      else if (key == "initial_observed") r.initial_observed = num(value);
      else if (key == "truncated") r.truncated = value == "1";
      continue;
    }
    if (!header) {
      header = true;
      continue;
    }
    const auto f = detail::split_commas(t);
    if (f.size() != 6) throw ParseError("series rows have six fields", lineno);
    StepRecord s{num(f[0]), static_cast<NodeId>(num(f[1])), num(f[2]), num(f[3]), std::nullopt, std::nullopt};
    if (!f[4].empty()) s.regret = num(f[4]);
    if (!f[5].empty()) s.cumulative_regret = num(f[5]);
    r.steps.push_back(s);
  }
  return r;
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Line chart of mean observed nodes per step, one series per summary, with
/// a +/- one standard deviation band.
inline std::string summary_svg(std::span<const Summary> summaries, std::string_view title = "Observed nodes") {
  constexpr double W = 720, H = 440, L = 70, R = 200, T = 40, B = 50;
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  double xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : summaries) {
    for (const auto& r : s.rows) {
      xmax = std::max(xmax, static_cast<double>(r.step));
      const double lo = r.mean_observed - r.std_observed;
      const double hi = r.mean_observed + r.std_observed;
      if (first) {
        ymin = lo;
        ymax = hi;
        first = false;
      }
      ymin = std::min(ymin, lo);
      ymax = std::max(ymax, hi);
    }
  }
  if (ymax <= ymin) ymax = ymin + 1;
  const auto px = [&](double x) { return L + (W - L - R) * x / xmax; };
  const auto py = [&](double y) { return H - B - (H - T - B) * (y - ymin) / (ymax - ymin); };
  const auto f = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f(W) + "\" height=\"" + f(H) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + f(L) + "\" y=\"24\" font-size=\"15\">" + detail::xml_escape(title) + "</text>\n";
  out += "<line x1=\"" + f(L) + "\" y1=\"" + f(H - B) + "\" x2=\"" + f(W - R) + "\" y2=\"" + f(H - B) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + f(L) + "\" y1=\"" + f(T) + "\" x2=\"" + f(L) + "\" y2=\"" + f(H - B) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmax * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    out += "<text x=\"" + f(px(xv)) + "\" y=\"" + f(H - B + 16) + "\" text-anchor=\"middle\">" + std::to_string(static_cast<long long>(std::llround(xv))) + "</text>\n";
    out += "<text x=\"" + f(L - 6) + "\" y=\"" + f(py(yv) + 4) + "\" text-anchor=\"end\">" + std::to_string(static_cast<long long>(std::llround(yv))) + "</text>\n";
  }
  out += "<text x=\"" + f((L + W - R) / 2) + "\" y=\"" + f(H - 12) + "\" text-anchor=\"middle\">probes</text>\n";

  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const auto& s = summaries[i];
    const std::string color = kColors[i % std::size(kColors)];
    if (!s.rows.empty()) {
      std::string band;
      for (const auto& r : s.rows) band += f(px(static_cast<double>(r.step))) + "," + f(py(r.mean_observed + r.std_observed)) + " ";
      for (auto it = s.rows.rbegin(); it != s.rows.rend(); ++it) band += f(px(static_cast<double>(it->step))) + "," + f(py(it->mean_observed - it->std_observed)) + " ";
      out += "<polygon points=\"" + band + "\" fill=\"" + color + "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
      std::string line;
      for (const auto& r : s.rows) line += f(px(static_cast<double>(r.step))) + "," + f(py(r.mean_observed)) + " ";
      out += "<polyline class=\"series\" data-label=\"" + detail::xml_escape(s.label) + "\" points=\"" + line + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    }
    const double ly = T + 18.0 * static_cast<double>(i);
    out += "<line x1=\"" + f(W - R + 12) + "\" y1=\"" + f(ly) + "\" x2=\"" + f(W - R + 32) + "\" y2=\"" + f(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text class=\"legend\" x=\"" + f(W - R + 38) + "\" y=\"" + f(ly + 4) + "\">" + detail::xml_escape(s.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

inline void emit_svg(std::span<const Summary> summaries, const std::filesystem::path& path) {
  write_text(path, summary_svg(summaries));
}

/// Writes series_<r>.csv for every repeat, summary.csv and run.meta into the
/// experiment's output directory.
inline Summary write_experiment_outputs(const ExperimentConfig& cfg, std::span<const RunSeries> series) {
  detail::ensure_directory(cfg.output_dir);
  for (std::size_t r = 0; r < series.size(); ++r) {
    write_text(cfg.output_dir / ("series_" + std::to_string(r) + ".csv"), series_csv(series[r]));
  }
  const auto summary = aggregate(series);
  emit_csv(summary, cfg.output_dir / "summary.csv");
  std::string meta = "fingerprint=" + config_fingerprint(cfg) + "\nlabel=" + policy_label(cfg.policy) + "\n" + canonical_config(cfg);
  write_text(cfg.output_dir / "run.meta", meta);
  return summary;
}

}  // namespace netexplore
