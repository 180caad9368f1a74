#pragma once

#include "tucb/graph.hpp"
#include "tucb/tensor_model.hpp"
#include "tucb/types.hpp"

namespace tucb {

enum class Projection {
  Sigmoid,  // logistic 1 / (1 + e^-x)
  Clip,     // clamp to [0, 1], for diagnostics
};

struct PolicyConfig {
  double ucb_scale = 0.1;  // the multiplier c, >= 0
  Projection proj = Projection::Sigmoid;
};

double project(Projection proj, double score);

// sqrt(-2 ln delta): the width multiplier matching tail probability delta.
double c_from_delta(double delta);

// c * sum_{l,r} sqrt((beta phi)^T Sigma (beta phi))
double ucb_width(const SusceptibilityPosterior& posterior, const ContextTensor& x,
                 double c);

// proj(predictive mean + UCB width), in [0, 1].
double activation_probability(const SusceptibilityPosterior& posterior,
                              const ContextTensor& x, const PolicyConfig& cfg);

// Optimistic activation probability for every directed edge: the context is
// phi_1 = source feature, phi_2 = target feature, then extra_modes
// (product and campaign vectors). Non-edges carry probability 0 by
// construction and are absent from the map.
EdgeProbabilities edge_probability_map(const SusceptibilityPosterior& posterior,
                                       const SocialGraph& graph,
                                       const FeatureTable& user_features,
                                       const std::vector<Vec>& extra_modes,
                                       const PolicyConfig& cfg);

}  // namespace tucb
