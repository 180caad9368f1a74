#include "tucb/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace tucb {

double project(Projection proj, double score) {
  switch (proj) {
    case Projection::Sigmoid:
      return 1.0 / (1.0 + std::exp(-score));
    case Projection::Clip:
      return std::clamp(score, 0.0, 1.0);
  }
  throw std::invalid_argument("unknown projection");
}

double c_from_delta(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("c_from_delta: delta must be in (0, 1)");
  }
  return std::sqrt(-2.0 * std::log(delta));
}

double ucb_width(const SusceptibilityPosterior& posterior, const ContextTensor& x,
                 double c) {
  if (c < 0.0) throw std::invalid_argument("ucb_width: c must be >= 0");
  double width = 0.0;
  for (double term : posterior.confidence_terms(x)) width += term;
  return c * width;
}

double activation_probability(const SusceptibilityPosterior& posterior,
                              const ContextTensor& x, const PolicyConfig& cfg) {
  const double mean = posterior.inner_product(x);
  return project(cfg.proj, mean + ucb_width(posterior, x, cfg.ucb_scale));
}

EdgeProbabilities edge_probability_map(const SusceptibilityPosterior& posterior,
                                       const SocialGraph& graph,
                                       const FeatureTable& user_features,
                                       const std::vector<Vec>& extra_modes,
                                       const PolicyConfig& cfg) {
  if (static_cast<int>(user_features.size()) < graph.node_count) {
    throw std::runtime_error("edge_probability_map: missing node features");
  }
  EdgeProbabilities probs(graph.edge_count());
  ContextTensor x;
  x.modes.resize(2 + extra_modes.size());
  for (std::size_t m = 0; m < extra_modes.size(); ++m) x.modes[2 + m] = extra_modes[m];
  for (int e = 0; e < graph.edge_count(); ++e) {
    x.modes[0] = user_features[graph.edges[e].src];
    x.modes[1] = user_features[graph.edges[e].dst];
    probs[e] = activation_probability(posterior, x, cfg);
  }
  return probs;
}

}  // namespace tucb
