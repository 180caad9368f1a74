#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tucb/graph.hpp"
#include "tucb/policy.hpp"
#include "tucb/seed_oracle.hpp"
#include "tucb/synth_env.hpp"
#include "tucb/tensor_model.hpp"

namespace tucb {

enum class Agent {
  TensorUcb,     // rank-R tensor regression + UCB scoring
  Random,        // ignores feedback, uniform seed sets
  ConcatLinUcb,  // D = R = 1 pipeline on the normalized concatenation
  Rank1,         // TensorUcb with the rank forced to 1
};

Agent agent_from_string(const std::string& name);
std::string to_string(Agent agent);
Projection projection_from_string(const std::string& name);
std::string to_string(Projection proj);

inline double default_eta() { return 1.0 - std::exp(-1.0) - 0.1; }

struct CampaignConfig {
  // campaign
  int rounds = 200;
  int budget = 10;
  int rank = 2;
  double sigma2 = 0.1;
  double ucb_c = 0.1;
  Projection proj = Projection::Sigmoid;
  int oracle_sims = 200;
  int regret_sims = 200;
  Agent agent = Agent::TensorUcb;
  double eta = default_eta();
  double smoothness_b = 1.0;
  // environment
  std::string graph_path;  // empty -> synthetic graph
  int nodes = 200;
  double mean_out_degree = 5.0;
  std::vector<int> dims = {10, 10, 10};
  int true_rank = 2;
  int n_products = 4;
  double heterogeneity = 1.0;
  std::string node_features_path;     // optional external features
  std::string product_features_path;  // optional external product pool
  // run control
  std::uint64_t seed = 1;
  std::string out_path;  // CSV destination; sidecar JSON next to it
  std::string save_posterior_path;
  std::string load_posterior_path;
};

struct RoundLog {
  int round = 0;       // 1-based
  int product_id = 0;
  std::vector<int> seeds;
  std::vector<std::pair<int, double>> feedback;  // (edge id, response)
  double spread = 0.0;      // realized f(S_t, P*)
  double opt_spread = 0.0;  // f(S*_t, P*)
  double regret = 0.0;      // instantaneous scaled regret
  double cum_regret = 0.0;
  double avg_regret = 0.0;
  double elapsed_ms = 0.0;  // wall clock
};

struct CampaignResult {
  SocialGraph graph;
  GroundTruthModel env;
  std::vector<RoundLog> rounds;
};

// Run one campaign. Every random decision is drawn from streams derived
// from (config.seed, purpose, round), so results are bit-reproducible.
// If out_path is set the CSV and sidecar JSON are written, including on
// mid-run failure (partial log flushed before the error propagates).
CampaignResult run_campaign(const CampaignConfig& cfg);

struct RegretSeries {
  std::vector<double> instantaneous;
  std::vector<double> cumulative;
  std::vector<double> average;  // R_t / t
};

// Recompute the scaled-regret series for logged rounds from the ground
// truth. Uses the same streams as run_campaign, so it reproduces the
// logged columns exactly for a matching config.
RegretSeries scaled_regret(const std::vector<RoundLog>& rounds,
                           const GroundTruthModel& env, const SocialGraph& graph,
                           const CampaignConfig& cfg);

struct BoundParams {
  double nodes = 0;    // |V|
  double order = 0;    // D
  double rank = 0;     // R
  double c = 0;
  double smoothness_b = 0;  // B
  double eta = 0;
  double rounds = 0;   // T
  double budget = 0;   // K
  double dim = 0;      // d = max_l d_l
  double sigma2 = 0;
};

// (cB/eta) |V| D R sqrt(T K d ln(1 + TK/(d sigma^2)) / ln(1 + 1/sigma^2))
double theoretical_regret_bound(const BoundParams& p);

// D R sqrt(K d ln(1 + TK/(d sigma^2)) / ln(1 + 1/sigma^2)) + w_max
double min_ucb_constant(const BoundParams& p, double w_max);

void write_csv(std::ostream& out, const std::vector<RoundLog>& rounds);
void write_csv_file(const std::string& path, const std::vector<RoundLog>& rounds);
std::string resolved_config_json(const CampaignConfig& cfg);

}  // namespace tucb
