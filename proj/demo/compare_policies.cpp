// Probes a partially observed LFR graph with several policies and prints how
// many nodes each one uncovers. Usage: compare_policies [seed] [budget]

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "netexplore/harness.hpp"

using namespace netexplore;

namespace {

void manual_loop(std::uint64_t seed) {
  LfrParams p;
  p.n = 2000;
  p.avg_degree = 15;
  p.max_degree = 80;
  p.mu = 0.1;
  p.seed = seed;
  const auto truth = generate_lfr(p);
  auto state = sample(truth, SampleSpec{SampleMethod::BFS, 0.05, seed});

  PolicyConfig pc;
  pc.kind = PolicyKind::IknnUcb;
  pc.alpha = 1.0;
  pc.k = 5;
  pc.warmup_T0 = 5;
  const FeatureOptions fo;
  auto policy = make_policy(pc, fo);
  Rng rng(seed);

  std::printf("step  node  reward  observed\n");
  for (int t = 0; t < 10; ++t) {
    const auto cands = features_of_candidates(state, fo);
    const NodeId v = policy->select(state, cands, rng);
    const auto it = std::lower_bound(cands.begin(), cands.end(), v,
                                     [](const CandidateFeatures& c, NodeId n) { return c.node < n; });
    const auto r = state.probe(truth, v, it->x);
    policy->observe(state.history().back());
    std::printf("%4zu  %4u  %6zu  %8zu\n", state.step(), static_cast<unsigned>(v), r.reward, state.observed_count());
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 7;
  const std::size_t budget = argc > 2 ? std::stoul(argv[2]) : 300;

  manual_loop(seed);

  ExperimentConfig cfg;
  cfg.graph.kind = GraphKind::Lfr;
  cfg.graph.lfr.n = 5000;
  cfg.graph.lfr.mu = 0.1;
  cfg.sample = SampleSpec{SampleMethod::BFS, 0.05, 0};
  cfg.budget_T = budget;
  cfg.repeats = 3;
  cfg.seed = seed;
  cfg.policy.alpha = 1.0;
  cfg.policy.k = 5;

  std::printf("\n%-28s %10s %8s\n", "policy", "observed", "std");
  for (auto kind : {PolicyKind::IknnUcb, PolicyKind::KnnGreedy, PolicyKind::LinUcb, PolicyKind::Mod, PolicyKind::Random}) {
    cfg.policy.kind = kind;
    cfg.policy.warmup_T0 = kind == PolicyKind::Mod || kind == PolicyKind::Random ? 0 : 10;
    const auto s = aggregate(run(cfg));
    std::printf("%-28s %10.1f %8.1f\n", policy_label(cfg.policy).c_str(), s.final_row()->mean_observed,
                s.final_row()->std_observed);
  }
  return 0;
}
