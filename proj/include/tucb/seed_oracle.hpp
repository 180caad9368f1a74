#pragma once

#include <vector>

#include "tucb/graph.hpp"

namespace tucb {

// Lazy-greedy (CELF) budgeted seed selection maximizing marginal
// Monte-Carlo spread. All candidate evaluations share one set of
// presampled cascade realizations (common random numbers), so the lazy
// bounds are exact for the sampled objective. Ties break on the lower
// node id. Returns exactly K distinct nodes in pick order.
std::vector<int> greedy_seeds(const SocialGraph& g, const EdgeProbabilities& probs,
                              int k, int n_sims, std::uint64_t stream_root);

// CELF with the exact enumeration spread (|E| <= 20 instances only).
std::vector<int> greedy_seeds_exact(const SocialGraph& g, const EdgeProbabilities& probs,
                                    int k);

// Exact optimum over all K-subsets by enumeration; lexicographically
// smallest among ties. Guarded to C(|V|, K) <= 1e5 and |E| <= 20.
std::vector<int> exhaustive_seeds(const SocialGraph& g, const EdgeProbabilities& probs,
                                  int k);

}  // namespace tucb
