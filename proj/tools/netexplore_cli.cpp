// Command-line front end: generate graphs, draw initial samples, run
// exploration experiments and turn run series into CSV/SVG reports.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "netexplore/netexplore.hpp"

namespace fs = std::filesystem;
using namespace netexplore;

namespace {

struct GenerateArgs {
  std::string model = "ba";
  std::size_t n = 0;
  std::size_t m = 3;
  std::size_t m0 = 0;
  double avg_degree = 25.0;
  std::size_t max_degree = 0;
  double gamma = 3.0;
  double beta = 1.3;
  double mu = 0.1;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string communities;
};

int cmd_generate(const GenerateArgs& a) {
  if (!a.seed) throw ConfigError("--seed is required");
  GroundTruthGraph g;
  if (a.model == "ba") {
    g = generate_ba(BaParams{a.n, a.m, a.m0, *a.seed});
  } else {
    LfrParams p;
    p.n = a.n;
    p.avg_degree = a.avg_degree;
    p.max_degree = a.max_degree;
    p.gamma = a.gamma;
    p.beta = a.beta;
    p.mu = a.mu;
    p.seed = *a.seed;
    g = generate_lfr(p);
  }
  write_edge_list(g, a.out);
  if (g.community_labels()) write_communities(g, a.communities.empty() ? a.out + ".communities" : a.communities);
  std::cout << "wrote " << a.out << ": " << g.node_count() << " nodes, " << g.edge_count() << " edges";
  if (g.community_labels()) std::cout << ", mixing " << mixing_fraction(g);
  std::cout << '\n';
  return 0;
}

struct SampleArgs {
  std::string graph;
  std::string method = "rn";
  double fraction = 0.05;
  std::string edge_policy = "induced";
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_sample(const SampleArgs& a) {
  if (!a.seed) throw ConfigError("--seed is required");
  const auto loaded = load_edge_list(a.graph);
  SampleSpec spec;
  spec.method = a.method == "rn" ? SampleMethod::RN : SampleMethod::BFS;
  spec.fraction = a.fraction;
  spec.seed = *a.seed;
  spec.edge_policy = a.edge_policy == "induced" ? EdgePolicy::InducedSubgraph : EdgePolicy::DiscoveryEdgesOnly;
  const auto state = sample(loaded.graph, spec);
  write_snapshot(state, a.out);
  std::cout << "wrote " << a.out << ": " << state.observed_count() << " observed nodes, " << state.edge_count()
            << " observed edges\n";
  return 0;
}

struct ExploreArgs {
  std::string config;
  std::vector<std::string> set;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget;
  std::optional<std::string> policy;
  std::optional<double> alpha;
  std::optional<std::size_t> k;
  std::optional<std::size_t> t0;
  std::optional<std::string> track_regret;
  std::optional<std::size_t> repeats;
  std::optional<std::string> output;
};

int cmd_explore(const ExploreArgs& a) {
  ConfigTree tree = a.config.empty() ? ConfigTree{} : read_config_tree(a.config);
  std::vector<std::string> overrides = a.set;
  if (a.seed) overrides.push_back("run.seed=" + std::to_string(*a.seed));
  if (a.budget) overrides.push_back("run.budget=" + std::to_string(*a.budget));
  if (a.policy) overrides.push_back("policy.kind=" + *a.policy);
  if (a.alpha) overrides.push_back("policy.alpha=" + format_double(*a.alpha));
  if (a.k) overrides.push_back("policy.k=" + std::to_string(*a.k));
  if (a.t0) overrides.push_back("policy.t0=" + std::to_string(*a.t0));
  if (a.track_regret) overrides.push_back("run.track_regret=" + *a.track_regret);
  if (a.repeats) overrides.push_back("run.repeats=" + std::to_string(*a.repeats));
  if (a.output) overrides.push_back("run.output_dir=" + *a.output);
  apply_overrides(tree, overrides);
  const auto cfg = config_from_tree(tree);

  const auto series = run(cfg);
  const auto summary = write_experiment_outputs(cfg, series);
  std::cout << "policy " << summary.label << " (warm-up T0=" << cfg.policy.warmup_T0 << "), fingerprint "
            << summary.fingerprint << '\n';
  for (std::size_t r = 0; r < series.size(); ++r) {
    const auto& s = series[r];
    std::cout << "  repeat " << r << ": " << s.steps.size() << " probes, observed "
              << (s.steps.empty() ? s.initial_observed : s.steps.back().observed) << " (from " << s.initial_observed
              << ")";
    if (!s.steps.empty() && s.steps.back().cumulative_regret) std::cout << ", regret " << *s.steps.back().cumulative_regret;
    if (s.truncated) std::cout << ", candidates exhausted";
    std::cout << '\n';
  }
  if (const auto* f = summary.final_row()) {
    std::cout << "mean final observed " << f->mean_observed << " +/- " << f->std_observed << '\n';
  }
  std::cout << "outputs in " << cfg.output_dir.string() << '\n';
  return 0;
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string out_dir = "report";
  std::string svg = "comparison.svg";
};

// Each input is a series CSV or a directory holding series_*.csv files.
int cmd_report(const ReportArgs& a) {
  std::map<std::string, std::vector<RunSeries>> groups;
  std::vector<std::string> order;
  auto add = [&](const fs::path& p) {
    auto s = parse_series_csv(read_text(p));
    if (!groups.contains(s.fingerprint)) order.push_back(s.fingerprint);
    groups[s.fingerprint].push_back(std::move(s));
  };
  for (const auto& in : a.inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(in)) {
        const auto name = e.path().filename().string();
        if (name.starts_with("series_") && name.ends_with(".csv")) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) add(f);
    } else {
      add(in);
    }
  }
  if (groups.empty()) throw IoError("no series files found");
  std::vector<Summary> summaries;
  for (const auto& fp : order) {
    summaries.push_back(aggregate(groups[fp]));
    const fs::path csv = fs::path(a.out_dir) / ("summary_" + fp + ".csv");
    emit_csv(summaries.back(), csv);
    std::cout << "wrote " << csv.string() << " (" << summaries.back().label << ", " << summaries.back().runs << " runs)\n";
  }
  const fs::path svg = fs::path(a.out_dir) / a.svg;
  emit_svg(summaries, svg);
  std::cout << "wrote " << svg.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive exploration of partially observed networks"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a ground-truth graph and write it as an edge list");
  g->add_option("--model", gen.model, "ba or lfr")->check(CLI::IsMember({"ba", "lfr"}));
  g->add_option("--n", gen.n, "Node count")->required();
  g->add_option("--m", gen.m, "BA: edges per new node");
  g->add_option("--m0", gen.m0, "BA: seed clique size (default m)");
  g->add_option("--avg-degree", gen.avg_degree, "LFR: average degree");
  g->add_option("--max-degree", gen.max_degree, "LFR: maximum degree (default n/10)");
  g->add_option("--gamma", gen.gamma, "LFR: degree exponent");
  g->add_option("--beta", gen.beta, "LFR: community size exponent");
  g->add_option("--mu", gen.mu, "LFR: mixing parameter");
  g->add_option("--seed", gen.seed, "Random seed")->required();
  g->add_option("--out", gen.out, "Edge-list output path")->required();
  g->add_option("--communities", gen.communities, "LFR community sidecar path (default <out>.communities)");

  SampleArgs smp;
  auto* s = app.add_subcommand("sample", "Draw an initial sample and write a state snapshot");
  s->add_option("--graph", smp.graph, "Edge-list input")->required()->check(CLI::ExistingFile);
  s->add_option("--method", smp.method, "rn or bfs")->check(CLI::IsMember({"rn", "bfs"}));
  s->add_option("--fraction", smp.fraction, "Fraction of nodes in the sample");
  s->add_option("--edge-policy", smp.edge_policy, "induced or discovery")->check(CLI::IsMember({"induced", "discovery"}));
  s->add_option("--seed", smp.seed, "Random seed")->required();
  s->add_option("--out", smp.out, "Snapshot output path")->required();

  ExploreArgs exp;
  auto* e = app.add_subcommand("explore", "Run an exploration experiment");
  e->add_option("--config", exp.config, "Experiment config file")->check(CLI::ExistingFile);
  e->add_option("--set", exp.set, "Override a config key: section.key=value (repeatable)");
  e->add_option("--seed", exp.seed, "Master seed");
  e->add_option("--budget", exp.budget, "Probes per run");
  e->add_option("--policy", exp.policy, "iknn_ucb, knn_greedy, knn_eps_greedy, lin_ucb, mod or random");
  e->add_option("--alpha", exp.alpha, "UCB exploration weight");
  e->add_option("--k", exp.k, "Neighbors in the k-NN model");
  e->add_option("--t0", exp.t0, "Warm-up probes");
  e->add_option("--track-regret", exp.track_regret, "true or false");
  e->add_option("--repeats", exp.repeats, "Seeded repeats");
  e->add_option("--output", exp.output, "Output directory");

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Aggregate run series into summary CSVs and an SVG chart");
  r->add_option("inputs", rep.inputs, "Series CSV files or experiment output directories")->required();
  r->add_option("--out-dir", rep.out_dir, "Directory for the report");
  r->add_option("--svg", rep.svg, "SVG file name");

  CLI11_PARSE(app, argc, argv);
  try {
    if (g->parsed()) return cmd_generate(gen);
    if (s->parsed()) return cmd_sample(smp);
    if (e->parsed()) return cmd_explore(exp);
    if (r->parsed()) return cmd_report(rep);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
