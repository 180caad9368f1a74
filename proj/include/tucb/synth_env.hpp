#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tucb/graph.hpp"
#include "tucb/tensor_model.hpp"
#include "tucb/types.hpp"

namespace tucb {

// Hidden ground truth behind the simulator: a rank-R* CP score model over
// (source, target, product) features, mapped to activation probabilities
// by a clipped linear scaling into [p_min, p_max].
struct GroundTruthModel {
  int true_rank = 0;
  std::vector<int> dims;                   // (d1, d2, d3)
  std::vector<std::vector<Vec>> hidden;    // hidden[l][r], l in {0,1,2}
  FeatureTable user_features;              // |V| entries, ||x|| <= 1
  std::vector<Vec> products;               // product pool, ||z|| <= 1
  double scale = 1.0;                      // score -> probability scaling
  double p_min = 0.0;
  double p_max = 0.6;

  // CP score for a (source, target, product) triple.
  double raw_score(const Vec& src, const Vec& dst, const Vec& z) const;
  // clamp(scale * raw_score, p_min, p_max)
  double probability(const Vec& src, const Vec& dst, const Vec& z) const;
};

// Deterministic synthetic environment. heterogeneity = 0 collapses every
// product onto one affinity pattern; heterogeneity = 1 assigns products to
// R* maximally distinct patterns with opposite-sign affinities. Preset
// user/product tables (externally built features) replace the generated
// ones; n_products is ignored when a product table is given.
GroundTruthModel generate_environment(const SocialGraph& graph,
                                      const std::vector<int>& dims, int true_rank,
                                      int n_products, double heterogeneity, Rng& rng,
                                      const FeatureTable* preset_users = nullptr,
                                      const std::vector<Vec>* preset_products = nullptr);

// p*_{i,j}^z for one edge; 0 for (i, j) not in the edge set.
double true_probability(const GroundTruthModel& env, const SocialGraph& graph, int src,
                        int dst, const Vec& z);

// Complete edge-id -> p* map for product z.
EdgeProbabilities true_edge_probabilities(const GroundTruthModel& env,
                                          const SocialGraph& graph, const Vec& z);

// One (context, response) tuple per out-edge of each seed, in seed order
// then edge-id order: y ~ Bernoulli(p*), context = (x_src, x_dst, z).
std::vector<std::pair<ContextTensor, double>> sample_feedback(
    const GroundTruthModel& env, const SocialGraph& graph, const std::vector<int>& seeds,
    const Vec& z, Rng& rng);

// Uniform product index from the pool.
int sample_product(const GroundTruthModel& env, Rng& rng);

// Optional external features: "id,v1,...,vd" per line, '#' comments
// ignored; vectors are norm-clamped on ingestion. Ids must be dense from 0.
FeatureTable load_features(std::istream& in);
FeatureTable load_features_file(const std::string& path);

}  // namespace tucb
