#include "tucb/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace tucb {

namespace {

// Stream purposes; combined with the root seed and round / product index.
enum StreamTag : std::uint64_t {
  TagGraph = 1,
  TagEnv = 2,
  TagPosterior = 3,
  TagProduct = 4,
  TagOracle = 5,
  TagFeedback = 6,
  TagSpread = 7,
  TagOptSeeds = 8,
  TagRandomAgent = 9,
};

Vec normalize_unit(Vec v) {
  const double n = v.norm();
  return n > 0 ? Vec(v / n) : v;
}

ContextTensor concat_context(const ContextTensor& x) {
  int total = 0;
  for (const Vec& m : x.modes) total += static_cast<int>(m.size());
  Vec cat(total);
  int at = 0;
  for (const Vec& m : x.modes) {
    cat.segment(at, m.size()) = m;
    at += static_cast<int>(m.size());
  }
  return ContextTensor({normalize_unit(std::move(cat))});
}

std::vector<int> uniform_distinct(int count, int upper, Rng& rng) {
  std::vector<int> pool(upper);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < count; ++i) {
    const int j = i + static_cast<int>(rng.below(upper - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

struct RoundCosts {
  double spread = 0.0;
  double opt_spread = 0.0;
};

// Realized and optimal spread under the truth, evaluated with common
// random numbers so identical seed sets give identical values.
RoundCosts evaluate_round(const SocialGraph& graph, const EdgeProbabilities& truth,
                          const std::vector<int>& seeds, const std::vector<int>& opt_seeds,
                          int regret_sims, std::uint64_t spread_stream) {
  RoundCosts out;
  if (graph.edge_count() <= 20) {
    out.spread = exact_spread(graph, truth, seeds);
    out.opt_spread = exact_spread(graph, truth, opt_seeds);
  } else {
    out.spread = mc_spread(graph, truth, seeds, regret_sims, spread_stream).mean;
    out.opt_spread = mc_spread(graph, truth, opt_seeds, regret_sims, spread_stream).mean;
  }
  return out;
}

// Per-product ground-truth state: probabilities, oracle seeds under the
// truth. Computed lazily once per distinct product.
class TruthCache {
 public:
  TruthCache(const GroundTruthModel& env, const SocialGraph& graph,
             const CampaignConfig& cfg)
      : env_(env), graph_(graph), cfg_(cfg), probs_(env.products.size()),
        opt_seeds_(env.products.size()), ready_(env.products.size(), false) {}

  const EdgeProbabilities& probs(int pid) {
    ensure(pid);
    return probs_[pid];
  }
  const std::vector<int>& opt_seeds(int pid) {
    ensure(pid);
    return opt_seeds_[pid];
  }

 private:
  void ensure(int pid) {
    if (ready_[pid]) return;
    probs_[pid] = true_edge_probabilities(env_, graph_, env_.products[pid]);
    opt_seeds_[pid] = greedy_seeds(graph_, probs_[pid], cfg_.budget, cfg_.oracle_sims,
                                   stream_seed(cfg_.seed, {TagOptSeeds, (std::uint64_t)pid}));
    ready_[pid] = true;
  }

  const GroundTruthModel& env_;
  const SocialGraph& graph_;
  const CampaignConfig& cfg_;
  std::vector<EdgeProbabilities> probs_;
  std::vector<std::vector<int>> opt_seeds_;
  std::vector<char> ready_;
};

void validate(const CampaignConfig& cfg) {
  if (cfg.rounds < 1) throw std::invalid_argument("config: rounds must be >= 1");
  if (cfg.rank < 1) throw std::invalid_argument("config: rank must be >= 1");
  if (!(cfg.sigma2 > 0.0)) throw std::invalid_argument("config: sigma2 must be positive");
  if (cfg.ucb_c < 0.0) throw std::invalid_argument("config: ucb-c must be >= 0");
  if (cfg.oracle_sims < 1 || cfg.regret_sims < 1) {
    throw std::invalid_argument("config: simulation counts must be >= 1");
  }
  if (!(cfg.eta > 0.0) || cfg.eta > 1.0) {
    throw std::invalid_argument("config: eta must be in (0, 1]");
  }
  if (cfg.dims.size() != 3) throw std::invalid_argument("config: expected 3 mode dims");
}

SocialGraph build_graph(const CampaignConfig& cfg) {
  if (!cfg.graph_path.empty()) return load_graph_file(cfg.graph_path);
  Rng rng = stream_rng(cfg.seed, {TagGraph});
  return random_graph(cfg.nodes, cfg.mean_out_degree, rng);
}

GroundTruthModel build_env(const CampaignConfig& cfg, const SocialGraph& graph) {
  FeatureTable users;
  std::vector<Vec> products;
  const FeatureTable* users_ptr = nullptr;
  const std::vector<Vec>* products_ptr = nullptr;
  if (!cfg.node_features_path.empty()) {
    users = load_features_file(cfg.node_features_path);
    users_ptr = &users;
  }
  if (!cfg.product_features_path.empty()) {
    products = load_features_file(cfg.product_features_path);
    products_ptr = &products;
  }
  Rng rng = stream_rng(cfg.seed, {TagEnv});
  return generate_environment(graph, cfg.dims, cfg.true_rank, cfg.n_products,
                              cfg.heterogeneity, rng, users_ptr, products_ptr);
}

void write_sidecar(const CampaignConfig& cfg, const std::vector<RoundLog>& rounds) {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(resolved_config_json(cfg));
  j["rounds_completed"] = rounds.size();
  nlohmann::json timings = nlohmann::json::array();
  nlohmann::json seed_sets = nlohmann::json::array();
  double total = 0.0;
  for (const RoundLog& r : rounds) {
    timings.push_back(r.elapsed_ms);
    seed_sets.push_back(r.seeds);
    total += r.elapsed_ms;
  }
  j["elapsed_ms"] = timings;  // full precision; CSV carries truncated ms
  j["total_elapsed_ms"] = total;
  j["seed_sets"] = seed_sets;
  std::ofstream out(cfg.out_path + ".meta.json");
  if (out) out << j.dump(2) << '\n';
}

void flush_outputs(const CampaignConfig& cfg, const std::vector<RoundLog>& rounds) {
  if (cfg.out_path.empty()) return;
  write_csv_file(cfg.out_path, rounds);
  write_sidecar(cfg, rounds);
}

}  // namespace

Agent agent_from_string(const std::string& name) {
  if (name == "tensor_ucb") return Agent::TensorUcb;
  if (name == "random") return Agent::Random;
  if (name == "concat_linucb") return Agent::ConcatLinUcb;
  if (name == "rank1") return Agent::Rank1;
  throw std::invalid_argument("unknown agent: " + name);
}

std::string to_string(Agent agent) {
  switch (agent) {
    case Agent::TensorUcb: return "tensor_ucb";
    case Agent::Random: return "random";
    case Agent::ConcatLinUcb: return "concat_linucb";
    case Agent::Rank1: return "rank1";
  }
  return "?";
}

Projection projection_from_string(const std::string& name) {
  if (name == "sigmoid") return Projection::Sigmoid;
  if (name == "clip") return Projection::Clip;
  throw std::invalid_argument("unknown projection: " + name);
}

std::string to_string(Projection proj) {
  return proj == Projection::Sigmoid ? "sigmoid" : "clip";
}

CampaignResult run_campaign(const CampaignConfig& cfg) {
  validate(cfg);

  CampaignResult result;
  result.graph = build_graph(cfg);
  const SocialGraph& graph = result.graph;
  if (cfg.budget < 1 || cfg.budget > graph.node_count) {
    throw std::invalid_argument("config: need 1 <= budget <= |V|");
  }
  result.env = build_env(cfg, graph);
  const GroundTruthModel& env = result.env;

  const bool learning = cfg.agent != Agent::Random;
  int model_order = 3;
  int model_rank = cfg.agent == Agent::Rank1 ? 1 : cfg.rank;
  std::vector<int> model_dims = cfg.dims;
  if (cfg.agent == Agent::ConcatLinUcb) {
    model_order = 1;
    model_rank = 1;
    model_dims = {cfg.dims[0] + cfg.dims[1] + cfg.dims[2]};
  }
  std::optional<SusceptibilityPosterior> posterior;
  if (learning) {
    if (cfg.load_posterior_path.empty()) {
      SusceptibilityPosterior::Options opts;  // jitter on: rank symmetry breaking
      posterior.emplace(model_order, model_rank, model_dims, cfg.sigma2,
                        stream_seed(cfg.seed, {TagPosterior}), opts);
    } else {
      posterior = SusceptibilityPosterior::load(cfg.load_posterior_path);
      if (posterior->dims() != model_dims || posterior->noise_variance() != cfg.sigma2) {
        throw std::invalid_argument("loaded posterior does not match the configuration");
      }
    }
  }

  PolicyConfig policy{cfg.ucb_c, cfg.proj};
  TruthCache truth(env, graph, cfg);

  double cum_regret = 0.0;
  try {
    for (int t = 1; t <= cfg.rounds; ++t) {
      const auto t0 = std::chrono::steady_clock::now();
      RoundLog log;
      log.round = t;

      Rng product_rng = stream_rng(cfg.seed, {TagProduct, (std::uint64_t)t});
      log.product_id = sample_product(env, product_rng);
      const Vec& z = env.products[log.product_id];

      if (cfg.agent == Agent::Random) {
        Rng pick = stream_rng(cfg.seed, {TagRandomAgent, (std::uint64_t)t});
        log.seeds = uniform_distinct(cfg.budget, graph.node_count, pick);
        std::sort(log.seeds.begin(), log.seeds.end());
      } else {
        EdgeProbabilities estimates;
        if (cfg.agent == Agent::ConcatLinUcb) {
          estimates.resize(graph.edge_count());
          for (int e = 0; e < graph.edge_count(); ++e) {
            ContextTensor x({env.user_features[graph.edges[e].src],
                             env.user_features[graph.edges[e].dst], z});
            estimates[e] = activation_probability(*posterior, concat_context(x), policy);
          }
        } else {
          estimates = edge_probability_map(*posterior, graph, env.user_features, {z}, policy);
        }
        log.seeds = greedy_seeds(graph, estimates, cfg.budget, cfg.oracle_sims,
                                 stream_seed(cfg.seed, {TagOracle, (std::uint64_t)t}));
      }

      Rng feedback_rng = stream_rng(cfg.seed, {TagFeedback, (std::uint64_t)t});
      auto feedback = sample_feedback(env, graph, log.seeds, z, feedback_rng);
      {
        int at = 0;
        for (int s : log.seeds) {
          for (int e : graph.out_edges[s]) log.feedback.emplace_back(e, feedback[at++].second);
        }
      }
      if (learning) {
        for (const auto& [x, y] : feedback) {
          posterior->absorb(cfg.agent == Agent::ConcatLinUcb ? concat_context(x) : x, y);
        }
      }

      const RoundCosts costs =
          evaluate_round(graph, truth.probs(log.product_id), log.seeds,
                         truth.opt_seeds(log.product_id), cfg.regret_sims,
                         stream_seed(cfg.seed, {TagSpread, (std::uint64_t)t}));
      log.spread = costs.spread;
      log.opt_spread = costs.opt_spread;
      log.regret = std::max(0.0, (costs.opt_spread - costs.spread) / cfg.eta);
      cum_regret += log.regret;
      log.cum_regret = cum_regret;
      log.avg_regret = cum_regret / t;

      log.elapsed_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
              .count();
      result.rounds.push_back(std::move(log));
    }
  } catch (...) {
    flush_outputs(cfg, result.rounds);  // keep the partial log
    throw;
  }

  if (learning && !cfg.save_posterior_path.empty()) {
    posterior->save(cfg.save_posterior_path);
  }
  flush_outputs(cfg, result.rounds);
  return result;
}

RegretSeries scaled_regret(const std::vector<RoundLog>& rounds, const GroundTruthModel& env,
                           const SocialGraph& graph, const CampaignConfig& cfg) {
  TruthCache truth(env, graph, cfg);
  RegretSeries series;
  double cum = 0.0;
  for (const RoundLog& log : rounds) {
    const RoundCosts costs =
        evaluate_round(graph, truth.probs(log.product_id), log.seeds,
                       truth.opt_seeds(log.product_id), cfg.regret_sims,
                       stream_seed(cfg.seed, {TagSpread, (std::uint64_t)log.round}));
    const double inst = std::max(0.0, (costs.opt_spread - costs.spread) / cfg.eta);
    cum += inst;
    series.instantaneous.push_back(inst);
    series.cumulative.push_back(cum);
    series.average.push_back(cum / log.round);
  }
  return series;
}

namespace {
void check_bound_params(const BoundParams& p) {
  const double positive[] = {p.nodes, p.order, p.rank,  p.c,   p.smoothness_b,
                             p.eta,   p.rounds, p.budget, p.dim, p.sigma2};
  for (double v : positive) {
    if (!(v > 0.0)) throw std::invalid_argument("bound parameters must be positive");
  }
  if (p.eta > 1.0) throw std::invalid_argument("eta must be in (0, 1]");
}
}  // namespace

double theoretical_regret_bound(const BoundParams& p) {
  check_bound_params(p);
  const double log_growth =
      std::log1p(p.rounds * p.budget / (p.dim * p.sigma2)) / std::log1p(1.0 / p.sigma2);
  return (p.c * p.smoothness_b / p.eta) * p.nodes * p.order * p.rank *
         std::sqrt(p.rounds * p.budget * p.dim * log_growth);
}

double min_ucb_constant(const BoundParams& p, double w_max) {
  check_bound_params(p);
  if (w_max < 0.0) throw std::invalid_argument("w_max must be >= 0");
  const double log_growth =
      std::log1p(p.rounds * p.budget / (p.dim * p.sigma2)) / std::log1p(1.0 / p.sigma2);
  return p.order * p.rank * std::sqrt(p.budget * p.dim * log_growth) + w_max;
}

void write_csv(std::ostream& out, const std::vector<RoundLog>& rounds) {
  out << "round,product_id,spread,opt_spread,regret,cum_regret,avg_regret,elapsed_ms\n";
  char row[256];
  for (const RoundLog& r : rounds) {
    std::snprintf(row, sizeof(row), "%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%lld\n", r.round,
                  r.product_id, r.spread, r.opt_spread, r.regret, r.cum_regret,
                  r.avg_regret, static_cast<long long>(r.elapsed_ms));
    out << row;
  }
}

void write_csv_file(const std::string& path, const std::vector<RoundLog>& rounds) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(out, rounds);
}

std::string resolved_config_json(const CampaignConfig& cfg) {
  nlohmann::json j;
  j["rounds"] = cfg.rounds;
  j["budget"] = cfg.budget;
  j["rank"] = cfg.rank;
  j["sigma2"] = cfg.sigma2;
  j["ucb_c"] = cfg.ucb_c;
  j["proj"] = to_string(cfg.proj);
  j["oracle_sims"] = cfg.oracle_sims;
  j["regret_sims"] = cfg.regret_sims;
  j["agent"] = to_string(cfg.agent);
  j["eta"] = cfg.eta;
  j["smoothness_b"] = cfg.smoothness_b;
  j["graph"] = cfg.graph_path;
  j["nodes"] = cfg.nodes;
  j["mean_out_degree"] = cfg.mean_out_degree;
  j["dims"] = cfg.dims;
  j["true_rank"] = cfg.true_rank;
  j["products"] = cfg.n_products;
  j["heterogeneity"] = cfg.heterogeneity;
  j["node_features"] = cfg.node_features_path;
  j["product_features"] = cfg.product_features_path;
  j["seed"] = cfg.seed;
  j["out"] = cfg.out_path;
  j["save_posterior"] = cfg.save_posterior_path;
  j["load_posterior"] = cfg.load_posterior_path;
  return j.dump(2);
}

}  // namespace tucb
