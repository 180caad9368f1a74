#include "tucb/synth_env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace tucb {

double GroundTruthModel::raw_score(const Vec& src, const Vec& dst, const Vec& z) const {
  double total = 0.0;
  for (int r = 0; r < true_rank; ++r) {
    total += src.dot(hidden[0][r]) * dst.dot(hidden[1][r]) * z.dot(hidden[2][r]);
  }
  return total;
}

double GroundTruthModel::probability(const Vec& src, const Vec& dst, const Vec& z) const {
  return std::clamp(scale * raw_score(src, dst, z), p_min, p_max);
}

namespace {

Vec random_unit_nonneg(int dim, Rng& rng) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = std::abs(rng.normal());
  double n = v.norm();
  return n > 0 ? Vec(v / n) : Vec::Unit(dim, 0);
}

Vec random_unit(int dim, Rng& rng) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  double n = v.norm();
  return n > 0 ? Vec(v / n) : Vec::Unit(dim, 0);
}

}  // namespace

GroundTruthModel generate_environment(const SocialGraph& graph,
                                      const std::vector<int>& dims, int true_rank,
                                      int n_products, double heterogeneity, Rng& rng,
                                      const FeatureTable* preset_users,
                                      const std::vector<Vec>* preset_products) {
  if (dims.size() != 3) {
    throw std::invalid_argument("generate_environment: expected 3 mode dimensions");
  }
  if (dims[0] != dims[1]) {
    throw std::invalid_argument(
        "generate_environment: source and target modes share the user feature space");
  }
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("generate_environment: dims must be >= 1");
  }
  if (true_rank < 1) throw std::invalid_argument("generate_environment: rank must be >= 1");
  if (dims[2] < true_rank) {
    throw std::invalid_argument(
        "generate_environment: product dim must be >= true rank (distinct patterns)");
  }
  if (n_products < 1) {
    throw std::invalid_argument("generate_environment: need at least one product");
  }
  if (heterogeneity < 0.0 || heterogeneity > 1.0) {
    throw std::invalid_argument("generate_environment: heterogeneity must be in [0, 1]");
  }

  GroundTruthModel env;
  env.true_rank = true_rank;
  env.dims = dims;
  env.hidden.assign(3, {});

  // User-mode factors and features are nonnegative so the user-pair
  // affinity of every rank is positive; the product mode carries the sign
  // structure that differentiates products.
  for (int r = 0; r < true_rank; ++r) {
    env.hidden[0].push_back(random_unit_nonneg(dims[0], rng));
    env.hidden[1].push_back(random_unit_nonneg(dims[1], rng));
  }

  // Orthonormal product patterns (Gram-Schmidt on random directions).
  std::vector<Vec> patterns;
  for (int r = 0; r < true_rank; ++r) {
    Vec v = random_unit(dims[2], rng);
    for (const Vec& u : patterns) v -= u.dot(v) * u;
    double n = v.norm();
    if (n < 1e-9) {
      v = Vec::Unit(dims[2], r % dims[2]);
      for (const Vec& u : patterns) v -= u.dot(v) * u;
      n = v.norm();
    }
    patterns.push_back(Vec(v / n));
  }
  env.hidden[2] = patterns;

  if (preset_users) {
    if (static_cast<int>(preset_users->size()) < graph.node_count) {
      throw std::invalid_argument("generate_environment: node feature table too small");
    }
    for (int i = 0; i < graph.node_count; ++i) {
      if ((*preset_users)[i].size() != dims[0]) {
        throw std::invalid_argument("generate_environment: node feature dim mismatch");
      }
      env.user_features.push_back(clamp_norm((*preset_users)[i]));
    }
  } else {
    env.user_features.reserve(graph.node_count);
    for (int i = 0; i < graph.node_count; ++i) {
      env.user_features.push_back(random_unit_nonneg(dims[0], rng));
    }
  }

  if (preset_products) {
    if (preset_products->empty()) {
      throw std::invalid_argument("generate_environment: empty product table");
    }
    for (const Vec& z : *preset_products) {
      if (z.size() != dims[2]) {
        throw std::invalid_argument("generate_environment: product feature dim mismatch");
      }
      env.products.push_back(clamp_norm(z));
    }
  } else {
    // Product q mixes the patterns: uniform weights at heterogeneity 0,
    // +1 on its assigned pattern and -1 elsewhere at heterogeneity 1.
    env.products.reserve(n_products);
    for (int q = 0; q < n_products; ++q) {
      Vec z = Vec::Zero(dims[2]);
      const int assigned = q % true_rank;
      for (int r = 0; r < true_rank; ++r) {
        const double uniform_w = 1.0 / true_rank;
        const double signed_w = (r == assigned) ? 1.0 : -1.0;
        z += ((1.0 - heterogeneity) * uniform_w + heterogeneity * signed_w) * patterns[r];
      }
      double n = z.norm();
      env.products.push_back(n > 0 ? Vec(z / n) : patterns[assigned]);
    }
  }

  // Scale so the largest on-graph score over the pool maps to p_max.
  double max_score = 0.0;
  for (const auto& e : graph.edges) {
    for (const Vec& z : env.products) {
      max_score = std::max(
          max_score, env.raw_score(env.user_features[e.src], env.user_features[e.dst], z));
    }
  }
  env.scale = max_score > 0.0 ? env.p_max / max_score : 1.0;
  return env;
}

double true_probability(const GroundTruthModel& env, const SocialGraph& graph, int src,
                        int dst, const Vec& z) {
  if (src < 0 || src >= graph.node_count || dst < 0 || dst >= graph.node_count) {
    throw std::invalid_argument("true_probability: node out of range");
  }
  for (int e : graph.out_edges[src]) {
    if (graph.edges[e].dst == dst) {
      return env.probability(env.user_features[src], env.user_features[dst], z);
    }
  }
  return 0.0;  // disconnected pairs never activate
}

EdgeProbabilities true_edge_probabilities(const GroundTruthModel& env,
                                          const SocialGraph& graph, const Vec& z) {
  EdgeProbabilities probs(graph.edge_count());
  for (int e = 0; e < graph.edge_count(); ++e) {
    probs[e] = env.probability(env.user_features[graph.edges[e].src],
                               env.user_features[graph.edges[e].dst], z);
  }
  return probs;
}

std::vector<std::pair<ContextTensor, double>> sample_feedback(
    const GroundTruthModel& env, const SocialGraph& graph, const std::vector<int>& seeds,
    const Vec& z, Rng& rng) {
  std::vector<std::pair<ContextTensor, double>> out;
  for (int s : seeds) {
    if (s < 0 || s >= graph.node_count) {
      throw std::invalid_argument("sample_feedback: seed out of range");
    }
    for (int e : graph.out_edges[s]) {
      const int j = graph.edges[e].dst;
      const double p = env.probability(env.user_features[s], env.user_features[j], z);
      const double y = rng.bernoulli(p) ? 1.0 : 0.0;
      ContextTensor x({env.user_features[s], env.user_features[j], z});
      out.emplace_back(std::move(x), y);
    }
  }
  return out;
}

int sample_product(const GroundTruthModel& env, Rng& rng) {
  if (env.products.empty()) {
    throw std::invalid_argument("sample_product: empty product pool");
  }
  return static_cast<int>(rng.below(env.products.size()));
}

FeatureTable load_features(std::istream& in) {
  FeatureTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    long long id = 0;
    if (!(fields >> id) || id != static_cast<long long>(table.size())) {
      throw std::runtime_error("feature parse error at line " + std::to_string(line_no) +
                               ": ids must be dense from 0");
    }
    std::vector<double> values;
    double v;
    while (fields >> v) values.push_back(v);
    if (values.empty() || !fields.eof()) {
      throw std::runtime_error("feature parse error at line " + std::to_string(line_no));
    }
    Vec x(static_cast<int>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) x[static_cast<int>(i)] = values[i];
    if (!table.empty() && x.size() != table.front().size()) {
      throw std::runtime_error("feature parse error at line " + std::to_string(line_no) +
                               ": inconsistent dimension");
    }
    table.push_back(clamp_norm(std::move(x)));
  }
  return table;
}

FeatureTable load_features_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open feature file " + path);
  return load_features(in);
}

}  // namespace tucb
