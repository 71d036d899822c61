// Acceptance suite: one PASS/FAIL line per criterion on stdout, progress on
// stderr. Criteria listed with --known-failures still print their verdict but
// do not fail the process; see the decisions ledger for why they are listed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "netexplore/netexplore.hpp"
#include "support/oracle.hpp"

using namespace netexplore;
namespace nt = netexplore::oracle;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 1) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::uint64_t g_seed = 1;
bool g_normalized = false;  // study switch, off for the verdicts

// ---------------------------------------------------------------------------
// 1. k-NN and UCB selection against brute force

Verdict oracle_equivalence() {
  Rng rng(derive_seed(g_seed, 101));
  const std::size_t ks[] = {1, 3, 5, 10};
  std::size_t knn_mismatch = 0;
  for (int inst = 0; inst < 1000; ++inst) {
    const bool grid = inst % 2 == 0;
    const auto pts = nt::random_points(rng, 1 + rng.uniform_index(200), grid);
    const auto x = nt::random_query(rng, grid);
    const std::size_t k = ks[inst % 4];
    const auto ref = nt::brute_knn(pts, x, k);
    const auto got = knn_set(pts, x, k);
    const auto tree = KnnIndex(pts).query(x, k);
    bool ok = got.size() == ref.size() && tree.size() == ref.size();
    for (std::size_t i = 0; ok && i < ref.size(); ++i) {
      ok = got[i].index == ref[i].index && got[i].distance == ref[i].distance && tree[i].index == ref[i].index &&
           tree[i].distance == ref[i].distance;
    }
    const KnnConfig cfg{k, 1e-6, false};
    ok = ok && estimate(pts, x, cfg) == nt::brute_estimate(ref) && uncertainty(pts, x, cfg) == nt::brute_sigma(ref);
    knn_mismatch += !ok;
  }

  std::size_t ucb_mismatch = 0;
  std::size_t feature_mismatch = 0;
  const double alphas[] = {0.0, 0.5, 1.0, 2.0, 10.0};
  for (int inst = 0; inst < 200; ++inst) {
    const auto g = nt::random_graph(rng, 30 + rng.uniform_index(270), 1.5 + rng.uniform01() * 4.0);
    SampleSpec spec;
    spec.method = inst % 2 ? SampleMethod::BFS : SampleMethod::RN;
    spec.fraction = 0.1;
    spec.seed = rng.next();
    auto state = sample(g, spec);
    const std::size_t probes = 1 + rng.uniform_index(25);
    for (std::size_t i = 0; i < probes && !state.candidates().empty(); ++i) {
      auto it = state.candidates().begin();
      std::advance(it, static_cast<std::ptrdiff_t>(rng.uniform_index(state.candidates().size())));
      state.probe(g, *it, compute_features(state, *it));
    }
    if (state.candidates().empty()) continue;
    PolicyConfig pc;
    pc.kind = PolicyKind::IknnUcb;
    pc.alpha = alphas[inst % 5];
    pc.k = ks[inst % 4];
    pc.warmup_T0 = 0;
    auto policy = make_policy(pc);
    const auto cands = features_of_candidates(state);
    Rng prng(1);
    const NodeId chosen = policy->select(state, cands, prng);
    std::vector<LabeledPoint> pts;
    for (const auto& rec : state.history()) pts.push_back({rec.features, static_cast<double>(rec.reward)});
    // Features are checked against their own oracle to 1e-12; the argmax
    // check then scores the same vectors the policy saw, since summation
    // order alone can flip a near tie.
    for (const auto& c : cands) {
      const auto ref = nt::brute_features(state, c.node);
      for (std::size_t d = 0; d < kFeatureDim; ++d) feature_mismatch += std::abs(ref[d] - c.x[d]) > 1e-12;
    }
    ucb_mismatch += chosen != nt::brute_ucb_choice(cands, pts, pc.k, pc.alpha);
  }
  return {knn_mismatch == 0 && ucb_mismatch == 0 && feature_mismatch == 0,
          "knn mismatches " + std::to_string(knn_mismatch) + "/1000, UCB argmax mismatches " +
              std::to_string(ucb_mismatch) + "/200, feature mismatches " + std::to_string(feature_mismatch)};
}

// ---------------------------------------------------------------------------
// 2. Randomized probe sequences

Verdict state_machine() {
  Rng rng(derive_seed(g_seed, 102));
  std::size_t violations = 0;
  std::string first;
  for (int seq = 0; seq < 10000; ++seq) {
    const std::size_t n = 2 + rng.uniform_index(499);
    const auto g = nt::random_graph(rng, n, 0.5 + rng.uniform01() * 5.0);
    SampleSpec spec;
    spec.method = rng.bernoulli(0.5) ? SampleMethod::BFS : SampleMethod::RN;
    spec.edge_policy = rng.bernoulli(0.5) ? EdgePolicy::InducedSubgraph : EdgePolicy::DiscoveryEdgesOnly;
    spec.fraction = 0.02 + rng.uniform01() * 0.2;
    spec.seed = rng.next();
    auto state = sample(g, spec);
    const std::size_t v0 = state.observed_count();
    std::vector<NodeStatus> before(n);
    std::size_t reward_sum = 0;
    const std::size_t steps = rng.uniform_index(40);
    auto fail = [&](const std::string& why) {
      if (violations++ == 0) first = "sequence " + std::to_string(seq) + ": " + why;
    };
    for (std::size_t t = 0; t < steps && !state.candidates().empty(); ++t) {
      for (NodeId v = 0; v < n; ++v) before[v] = state.status(v);
      auto it = state.candidates().begin();
      std::advance(it, static_cast<std::ptrdiff_t>(rng.uniform_index(state.candidates().size())));
      reward_sum += state.probe(g, *it, {}).reward;
      for (NodeId v = 0; v < n; ++v) {
        if (state.status(v) < before[v]) fail("status of " + std::to_string(v) + " moved backwards");
      }
      if (auto why = nt::state_violation(state, g); !why.empty()) fail(why);
    }
    if (auto why = find_invariant_violation(state, g)) fail(*why);
    if (reward_sum != state.observed_count() - v0) fail("sum of rewards differs from |V'_T| - |V'_0|");
  }
  return {violations == 0, "10000 sequences, " + std::to_string(violations) + " violations" +
                               (first.empty() ? "" : " (" + first + ")")};
}

// ---------------------------------------------------------------------------
// 3. Generator statistics

// Least-squares slope of log p(k) against log k over logarithmic degree
// bins, for k above 2m (the preferential-attachment regime).
double degree_pdf_slope(const GroundTruthGraph& g, std::size_t kmin) {
  std::size_t kmax = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) kmax = std::max(kmax, g.degree(v));
  std::vector<double> edges;
  for (double b = static_cast<double>(kmin); b <= static_cast<double>(kmax) + 1; b *= 1.5) edges.push_back(b);
  edges.push_back(static_cast<double>(kmax) + 1);
  std::vector<double> count(edges.size() - 1, 0.0);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto d = static_cast<double>(g.degree(v));
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      if (d >= edges[i] && d < edges[i + 1]) count[i] += 1.0;
    }
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = std::ceil(edges[i]);
    const double hi = std::ceil(edges[i + 1]);
    if (count[i] < 1.0 || hi <= lo) continue;
    lx.push_back(std::log(std::sqrt(lo * (hi - 1))));
    ly.push_back(std::log(count[i] / (hi - lo)));
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Verdict generator_statistics() {
  bool ok = true;
  std::string detail;
  double slope_sum = 0.0;
  std::size_t edge_errors = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const BaParams p{2000, 3, 0, derive_seed(g_seed, 300 + s)};
    const auto g = generate_ba(p);
    edge_errors += g.edge_count() != ba_edge_count(p);
    slope_sum += degree_pdf_slope(g, 2 * p.m);
  }
  const double slope = slope_sum / 10.0;
  ok = edge_errors == 0 && slope >= -3.5 && slope <= -2.5;
  detail = "BA edge-count errors " + std::to_string(edge_errors) + ", mean tail slope " + fmt(slope, 3);
  for (double mu : {0.1, 0.3, 0.5}) {
    LfrParams p;
    p.n = 5000;
    p.mu = mu;
    p.seed = derive_seed(g_seed, 310 + static_cast<std::uint64_t>(mu * 10));
    try {
      const auto g = generate_lfr(p);
      const double mix = mixing_fraction(g);
      const double deg = 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.node_count());
      ok = ok && std::abs(mix - mu) <= 0.05 && std::abs(deg - 25.0) <= 2.5;
      detail += "; LFR mu=" + fmt(mu) + " mixing " + fmt(mix, 3) + " mean degree " + fmt(deg, 2);
    } catch (const GenerationFailed& e) {
      ok = false;
      detail += "; LFR mu=" + fmt(mu) + " failed: " + e.what();
    }
  }
  return {ok, detail};
}

// ---------------------------------------------------------------------------
// Experiment helpers

ExperimentConfig base_config(PolicyKind kind, double alpha) {
  ExperimentConfig c;
  c.policy.kind = kind;
  c.policy.alpha = alpha;
  c.policy.k = 5;
  c.policy.normalized_estimate = g_normalized;
  // Warm-up exists to seed the k-NN model; the heuristics start right away.
  c.policy.warmup_T0 = kind == PolicyKind::Mod || kind == PolicyKind::Random ? 0 : 10;
  c.budget_T = 1000;
  c.repeats = 5;
  c.seed = g_seed;
  return c;
}

ExperimentConfig lfr_config(PolicyKind kind, double alpha, double mu) {
  auto c = base_config(kind, alpha);
  c.graph.kind = GraphKind::Lfr;
  c.graph.lfr.n = 34546;
  c.graph.lfr.avg_degree = 25;
  c.graph.lfr.gamma = 3;
  c.graph.lfr.beta = 1.3;
  c.graph.lfr.mu = mu;
  c.sample.method = SampleMethod::BFS;
  c.sample.fraction = 0.05;
  return c;
}

double mean_final(const std::vector<RunSeries>& runs) {
  double s = 0.0;
  for (const auto& r : runs) s += static_cast<double>(r.steps.empty() ? r.initial_observed : r.steps.back().observed);
  return s / static_cast<double>(runs.size());
}

std::vector<RunSeries> timed_run(const ExperimentConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  auto out = run(c);
  const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "  " << policy_label(c.policy) << ": mean final observed " << fmt(mean_final(out)) << " (" << fmt(secs)
            << " s)\n";
  return out;
}

// ---------------------------------------------------------------------------
// 4. BA favors MOD

Verdict ba_favors_mod() {
  bool ok = true;
  std::string detail;
  for (auto method : {SampleMethod::RN, SampleMethod::BFS}) {
    auto cfg = [&](PolicyKind kind, double alpha) {
      auto c = base_config(kind, alpha);
      c.graph.kind = GraphKind::Ba;
      c.graph.ba.n = 50000;
      c.graph.ba.m = 20;
      c.sample.method = method;
      return c;
    };
    const char* name = method == SampleMethod::RN ? "RN" : "BFS";
    std::cerr << " BA, " << name << " sample\n";
    const double mod = mean_final(timed_run(cfg(PolicyKind::Mod, 0)));
    const double rnd = mean_final(timed_run(cfg(PolicyKind::Random, 0)));
    detail += std::string(detail.empty() ? "" : "; ") + name + ": MOD " + fmt(mod) + " Random " + fmt(rnd);
    for (double alpha : {0.5, 1.0, 2.0}) {
      const double ik = mean_final(timed_run(cfg(PolicyKind::IknnUcb, alpha)));
      ok = ok && mod >= ik && ik > rnd && mod > rnd;
      detail += " iKNN(a=" + fmt(alpha) + ") " + fmt(ik);
    }
  }
  return {ok, detail};
}

// ---------------------------------------------------------------------------
// 5-8 share the mu = 0.1 LFR runs.

struct LfrResults {
  std::map<std::string, std::vector<RunSeries>> runs;  // by policy name
  std::map<std::string, std::string> csv;              // summary + series bytes
};

LfrResults run_lfr(double mu) {
  std::cerr << " LFR mu=" << fmt(mu) << ", BFS sample\n";
  LfrResults out;
  const std::pair<const char*, PolicyKind> policies[] = {{"iknn_ucb", PolicyKind::IknnUcb},
                                                         {"mod", PolicyKind::Mod},
                                                         {"random", PolicyKind::Random},
                                                         {"knn_greedy", PolicyKind::KnnGreedy}};
  for (const auto& [name, kind] : policies) {
    auto c = lfr_config(kind, kind == PolicyKind::IknnUcb ? 1.0 : 0.0, mu);
    c.track_regret = kind == PolicyKind::IknnUcb;
    auto runs = timed_run(c);
    std::string bytes = summary_csv(aggregate(runs));
    for (const auto& r : runs) bytes += series_csv(r);
    out.csv[name] = std::move(bytes);
    out.runs[name] = std::move(runs);
  }
  return out;
}

Verdict communities_favor_iknn(const LfrResults& r) {
  const double ik = mean_final(r.runs.at("iknn_ucb"));
  const double mod = mean_final(r.runs.at("mod"));
  const double rnd = mean_final(r.runs.at("random"));
  const double kg = mean_final(r.runs.at("knn_greedy"));
  const double best = std::max({mod, rnd, kg});
  return {ik > mod && ik > rnd && ik > kg && ik >= 1.10 * best,
          "iKNN-UCB " + fmt(ik) + ", MOD " + fmt(mod) + ", Random " + fmt(rnd) + ", KNN-greedy " + fmt(kg) +
              ", ratio to best baseline " + fmt(ik / best, 3) + " (need >= 1.100)"};
}

Verdict mu_monotonicity(const LfrResults& low) {
  std::cerr << " LFR mu=0.5, BFS sample\n";
  const double ik5 = mean_final(timed_run(lfr_config(PolicyKind::IknnUcb, 1.0, 0.5)));
  const double mod5 = mean_final(timed_run(lfr_config(PolicyKind::Mod, 0.0, 0.5)));
  const double gap1 = mean_final(low.runs.at("iknn_ucb")) - mean_final(low.runs.at("mod"));
  const double gap5 = ik5 - mod5;
  return {gap1 >= gap5, "iKNN-UCB minus MOD: mu=0.1 " + fmt(gap1) + ", mu=0.5 " + fmt(gap5)};
}

Verdict sublinear_regret(const LfrResults& r) {
  std::size_t good = 0;
  std::string detail;
  for (const auto& s : r.runs.at("iknn_ucb")) {
    auto avg_ratio = [&](std::size_t from, std::size_t to) {  // steps t in (from, to]
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& st : s.steps) {
        if (st.t > from && st.t <= to) {
          sum += static_cast<double>(*st.cumulative_regret) / static_cast<double>(st.t);
          ++count;
        }
      }
      return sum / static_cast<double>(std::max<std::size_t>(count, 1));
    };
    const std::size_t T = s.steps.size();
    const double q2 = avg_ratio(T / 4, T / 2);
    const double q4 = avg_ratio(3 * T / 4, T);
    good += q4 < q2;
    detail += std::string(detail.empty() ? "" : ", ") + fmt(q2, 2) + "->" + fmt(q4, 2);
  }
  return {good >= 4, std::to_string(good) + "/5 seeds with falling R_t/t (Q2->Q4: " + detail + ")"};
}

Verdict determinism(const LfrResults& first) {
  std::cerr << " LFR mu=0.1 rerun\n";
  const auto again = run_lfr(0.1);
  std::size_t differ = 0;
  for (const auto& [name, bytes] : first.csv) differ += again.csv.at(name) != bytes;
  return {differ == 0, std::to_string(first.csv.size() - differ) + "/" + std::to_string(first.csv.size()) +
                           " policy outputs byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netexplore acceptance suite"};
  std::set<int> only;
  std::set<int> known;
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--known-failures", known, "Criteria whose failure does not fail the process");
  app.add_option("--seed", g_seed, "Master seed");
  app.add_flag("--normalized-estimate", g_normalized, "Use the weight-normalized k-NN estimate (study only)");
  CLI11_PARSE(app, argc, argv);

  auto wanted = [&](int c) { return only.empty() || only.contains(c); };
  int unexpected = 0;
  auto report = [&](int id, const char* name, const Verdict& v) {
    const char* tag = v.pass ? "PASS" : known.contains(id) ? "FAIL (known)" : "FAIL";
    std::cout << "[" << tag << "] " << id << " " << name << ": " << v.detail << std::endl;
    unexpected += !v.pass && !known.contains(id);
  };
  auto section = [&](int id, const char* name, const std::function<Verdict()>& f) {
    if (!wanted(id)) return;
    std::cerr << "criterion " << id << "\n";
    report(id, name, f());
  };

  section(1, "oracle equivalence", oracle_equivalence);
  section(2, "state-machine properties", state_machine);
  section(3, "generator statistics", generator_statistics);
  section(4, "BA favors MOD", ba_favors_mod);
  if (wanted(5) || wanted(6) || wanted(7) || wanted(8)) {
    std::cerr << "criteria 5-8\n";
    const auto low = run_lfr(0.1);
    if (wanted(5)) report(5, "community structure favors iKNN-UCB", communities_favor_iknn(low));
    if (wanted(6)) report(6, "advantage shrinks with mu", mu_monotonicity(low));
    if (wanted(7)) report(7, "sublinear regret", sublinear_regret(low));
    if (wanted(8)) report(8, "determinism", determinism(low));
  }
  return unexpected == 0 ? 0 : 1;
}
