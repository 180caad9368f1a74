// tensorim: tensor contextual-bandit campaigns on social graphs.
//   run          simulate a campaign and write the per-round CSV
//   bound        evaluate the theoretical regret bound and the UCB floor
//   oracle-check compare greedy seed selection against exhaustive optimum

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tucb/harness.hpp"

namespace {

void apply_config_file(const std::string& path, tucb::CampaignConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  nlohmann::json j;
  in >> j;
  if (j.contains("rounds")) cfg.rounds = j["rounds"].get<int>();
  if (j.contains("budget")) cfg.budget = j["budget"].get<int>();
  if (j.contains("rank")) cfg.rank = j["rank"].get<int>();
  if (j.contains("sigma2")) cfg.sigma2 = j["sigma2"].get<double>();
  if (j.contains("ucb_c")) cfg.ucb_c = j["ucb_c"].get<double>();
  if (j.contains("proj")) cfg.proj = tucb::projection_from_string(j["proj"].get<std::string>());
  if (j.contains("oracle_sims")) cfg.oracle_sims = j["oracle_sims"].get<int>();
  if (j.contains("regret_sims")) cfg.regret_sims = j["regret_sims"].get<int>();
  if (j.contains("agent")) cfg.agent = tucb::agent_from_string(j["agent"].get<std::string>());
  if (j.contains("eta")) cfg.eta = j["eta"].get<double>();
  if (j.contains("smoothness_b")) cfg.smoothness_b = j["smoothness_b"].get<double>();
  if (j.contains("graph")) cfg.graph_path = j["graph"].get<std::string>();
  if (j.contains("nodes")) cfg.nodes = j["nodes"].get<int>();
  if (j.contains("mean_out_degree")) cfg.mean_out_degree = j["mean_out_degree"].get<double>();
  if (j.contains("dims")) cfg.dims = j["dims"].get<std::vector<int>>();
  if (j.contains("true_rank")) cfg.true_rank = j["true_rank"].get<int>();
  if (j.contains("products")) cfg.n_products = j["products"].get<int>();
  if (j.contains("heterogeneity")) cfg.heterogeneity = j["heterogeneity"].get<double>();
  if (j.contains("node_features")) cfg.node_features_path = j["node_features"].get<std::string>();
  if (j.contains("product_features"))
    cfg.product_features_path = j["product_features"].get<std::string>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("out")) cfg.out_path = j["out"].get<std::string>();
  if (j.contains("save_posterior")) cfg.save_posterior_path = j["save_posterior"].get<std::string>();
  if (j.contains("load_posterior")) cfg.load_posterior_path = j["load_posterior"].get<std::string>();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tensor contextual bandits for influence maximization"};
  app.require_subcommand(1);

  // ---- run ----
  auto* run = app.add_subcommand("run", "simulate a campaign");
  tucb::CampaignConfig cfg;
  std::string config_path, agent_name = "tensor_ucb", proj_name = "sigmoid";
  bool synthetic = false;
  run->add_option("--config", config_path, "JSON config file (flags override it)");
  run->add_option("--graph", cfg.graph_path, "edge list file (src<TAB>dst per line)");
  run->add_flag("--synthetic", synthetic, "use a synthetic graph and environment");
  run->add_option("--agent", agent_name, "tensor_ucb | random | concat_linucb | rank1");
  run->add_option("--rounds", cfg.rounds, "campaign rounds T");
  run->add_option("--budget", cfg.budget, "seeds per round K");
  run->add_option("--rank", cfg.rank, "model CP rank R");
  run->add_option("--sigma2", cfg.sigma2, "observation noise variance");
  run->add_option("--ucb-c", cfg.ucb_c, "UCB width multiplier c");
  run->add_option("--proj", proj_name, "score projection: sigmoid | clip");
  run->add_option("--heterogeneity", cfg.heterogeneity, "product heterogeneity in [0,1]");
  run->add_option("--products", cfg.n_products, "synthetic product pool size");
  run->add_option("--oracle-sims", cfg.oracle_sims, "cascade samples per oracle evaluation");
  run->add_option("--regret-sims", cfg.regret_sims, "cascade samples per regret evaluation");
  run->add_option("--seed", cfg.seed, "root seed");
  run->add_option("--out", cfg.out_path, "CSV output path (sidecar <out>.meta.json)");
  run->add_option("--nodes", cfg.nodes, "synthetic graph size");
  run->add_option("--mean-out-degree", cfg.mean_out_degree, "synthetic mean out-degree");
  run->add_option("--true-rank", cfg.true_rank, "environment hidden rank");
  run->add_option("--node-features", cfg.node_features_path, "node feature file");
  run->add_option("--product-features", cfg.product_features_path, "product feature file");
  run->add_option("--save-posterior", cfg.save_posterior_path, "posterior snapshot output");
  run->add_option("--load-posterior", cfg.load_posterior_path, "resume from snapshot");

  // ---- bound ----
  auto* bound = app.add_subcommand("bound", "evaluate the regret bound and UCB floor");
  tucb::BoundParams bp{200, 3, 2, 0.1, 1.0, tucb::default_eta(), 200, 10, 10, 0.1};
  double w_max = 1.0;
  bound->add_option("--nodes", bp.nodes, "|V|");
  bound->add_option("--order", bp.order, "tensor order D");
  bound->add_option("--rank", bp.rank, "CP rank R");
  bound->add_option("--ucb-c", bp.c, "UCB multiplier c");
  bound->add_option("--smoothness-b", bp.smoothness_b, "bounded-smoothness constant B");
  bound->add_option("--eta", bp.eta, "oracle approximation factor");
  bound->add_option("--rounds", bp.rounds, "T");
  bound->add_option("--budget", bp.budget, "K");
  bound->add_option("--dim", bp.dim, "max mode dimension d");
  bound->add_option("--sigma2", bp.sigma2, "noise variance");
  bound->add_option("--w-max", w_max, "max factor mean norm");

  // ---- oracle-check ----
  auto* ocheck = app.add_subcommand("oracle-check", "greedy vs exhaustive on small instances");
  int oc_instances = 10, oc_nodes = 8, oc_edges = 12, oc_budget = 2, oc_sims = 500;
  std::uint64_t oc_seed = 1;
  ocheck->add_option("--instances", oc_instances, "number of random instances");
  ocheck->add_option("--nodes", oc_nodes, "nodes per instance (<= 12)");
  ocheck->add_option("--edges", oc_edges, "edges per instance (<= 20)");
  ocheck->add_option("--budget", oc_budget, "seed budget K (<= 3)");
  ocheck->add_option("--sims", oc_sims, "cascade samples for the MC greedy");
  ocheck->add_option("--seed", oc_seed, "root seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      cfg.agent = tucb::agent_from_string(agent_name);
      cfg.proj = tucb::projection_from_string(proj_name);
      if (!config_path.empty()) {
        // precedence: explicit flag > config file > default
        tucb::CampaignConfig flag_cfg = cfg;
        apply_config_file(config_path, cfg);
        auto passed = [&](const char* name) { return run->count(name) > 0; };
        if (passed("--graph")) cfg.graph_path = flag_cfg.graph_path;
        if (passed("--agent")) cfg.agent = flag_cfg.agent;
        if (passed("--rounds")) cfg.rounds = flag_cfg.rounds;
        if (passed("--budget")) cfg.budget = flag_cfg.budget;
        if (passed("--rank")) cfg.rank = flag_cfg.rank;
        if (passed("--sigma2")) cfg.sigma2 = flag_cfg.sigma2;
        if (passed("--ucb-c")) cfg.ucb_c = flag_cfg.ucb_c;
        if (passed("--proj")) cfg.proj = flag_cfg.proj;
        if (passed("--heterogeneity")) cfg.heterogeneity = flag_cfg.heterogeneity;
        if (passed("--products")) cfg.n_products = flag_cfg.n_products;
        if (passed("--oracle-sims")) cfg.oracle_sims = flag_cfg.oracle_sims;
        if (passed("--regret-sims")) cfg.regret_sims = flag_cfg.regret_sims;
        if (passed("--seed")) cfg.seed = flag_cfg.seed;
        if (passed("--out")) cfg.out_path = flag_cfg.out_path;
        if (passed("--nodes")) cfg.nodes = flag_cfg.nodes;
        if (passed("--mean-out-degree")) cfg.mean_out_degree = flag_cfg.mean_out_degree;
        if (passed("--true-rank")) cfg.true_rank = flag_cfg.true_rank;
        if (passed("--node-features")) cfg.node_features_path = flag_cfg.node_features_path;
        if (passed("--product-features"))
          cfg.product_features_path = flag_cfg.product_features_path;
        if (passed("--save-posterior")) cfg.save_posterior_path = flag_cfg.save_posterior_path;
        if (passed("--load-posterior")) cfg.load_posterior_path = flag_cfg.load_posterior_path;
      }
      if (!synthetic && cfg.graph_path.empty() && config_path.empty()) {
        throw std::runtime_error("run: pass --graph PATH or --synthetic");
      }
      tucb::CampaignResult result = tucb::run_campaign(cfg);
      if (cfg.out_path.empty()) tucb::write_csv(std::cout, result.rounds);
      const tucb::RoundLog& last = result.rounds.back();
      std::cerr << "agent=" << tucb::to_string(cfg.agent) << " rounds=" << last.round
                << " cum_regret=" << last.cum_regret << " avg_regret=" << last.avg_regret
                << "\n";
    } else if (*bound) {
      const double value = tucb::theoretical_regret_bound(bp);
      const double floor = tucb::min_ucb_constant(bp, w_max);
      std::printf("regret_bound %.6g\n", value);
      std::printf("ucb_c_floor %.6g\n", floor);
      std::printf("configured_c %.6g (%s the floor)\n", bp.c,
                  bp.c >= floor ? "meets" : "below");
    } else if (*ocheck) {
      int eta_ok = 0;
      const double eta = tucb::default_eta();
      std::printf("instance  greedy_spread  optimum  ratio\n");
      for (int i = 0; i < oc_instances; ++i) {
        tucb::Rng rng = tucb::stream_rng(oc_seed, {static_cast<std::uint64_t>(i)});
        std::vector<std::pair<int, int>> rows;
        while (static_cast<int>(rows.size()) < oc_edges) {
          int u = static_cast<int>(rng.below(oc_nodes));
          int v = static_cast<int>(rng.below(oc_nodes));
          if (u != v) rows.emplace_back(u, v);
        }
        tucb::SocialGraph g = tucb::make_graph(oc_nodes, rows);
        tucb::EdgeProbabilities probs(g.edge_count());
        for (double& p : probs) p = rng.uniform(0.1, 0.9);
        auto greedy = tucb::greedy_seeds(g, probs, oc_budget, oc_sims,
                                         tucb::stream_seed(oc_seed, {7u, (std::uint64_t)i}));
        auto best = tucb::exhaustive_seeds(g, probs, oc_budget);
        const double fg = tucb::exact_spread(g, probs, greedy);
        const double fo = tucb::exact_spread(g, probs, best);
        const double ratio = fo > 0 ? fg / fo : 1.0;
        if (ratio >= eta) ++eta_ok;
        std::printf("%8d  %13.4f  %7.4f  %.4f\n", i, fg, fo, ratio);
      }
      std::printf("eta=%.4f satisfied in %d/%d instances\n", eta, eta_ok, oc_instances);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
