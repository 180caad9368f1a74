#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tucb/rng.hpp"

namespace tucb {

// Directed social graph. Edge ids are stable and assigned in input order
// after self-loop/duplicate filtering. No self-loops, no duplicate edges.
struct SocialGraph {
  struct Edge {
    int src = 0;
    int dst = 0;
  };

  int node_count = 0;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> out_edges;  // node -> edge ids

  int edge_count() const { return static_cast<int>(edges.size()); }
  int out_degree(int node) const { return static_cast<int>(out_edges[node].size()); }
};

struct GraphLoadStats {
  int self_loops_dropped = 0;
  int duplicates_dropped = 0;
  int warnings() const { return self_loops_dropped + duplicates_dropped; }
};

// Build from an explicit edge list (filters self-loops and duplicates).
SocialGraph make_graph(int node_count, const std::vector<std::pair<int, int>>& edges,
                       GraphLoadStats* stats = nullptr);

// "src<TAB>dst" per line, integer ids, '#' comments and blank lines ignored.
// Malformed rows raise a parse error naming the line number.
SocialGraph load_graph(std::istream& in, GraphLoadStats* stats = nullptr);
SocialGraph load_graph_file(const std::string& path, GraphLoadStats* stats = nullptr);

// Directed Erdos-Renyi style graph with the given expected out-degree.
SocialGraph random_graph(int node_count, double mean_out_degree, Rng& rng);

// edge id -> activation probability, complete over the edge set.
using EdgeProbabilities = std::vector<double>;

struct CascadeOutcome {
  std::vector<int> activated;                      // includes the seeds
  std::vector<std::pair<int, bool>> edge_trials;   // (edge id, fired), one per
                                                   // out-edge of each activated node
};

// Independent cascade by synchronous BFS rounds; every out-edge of an
// activated node is tried exactly once.
CascadeOutcome simulate_cascade(const SocialGraph& g, const EdgeProbabilities& probs,
                                const std::vector<int>& seeds, Rng& rng);

// Expected |activated| by exact enumeration over all 2^|E| edge
// realizations. Guarded to |E| <= 20.
double exact_spread(const SocialGraph& g, const EdgeProbabilities& probs,
                    const std::vector<int>& seeds);

struct SpreadEstimate {
  double mean = 0.0;
  double stderr = 0.0;
};

// Monte-Carlo spread over n_sims cascades with per-simulation streams
// derived from stream_root (parallel and serial runs agree).
SpreadEstimate mc_spread(const SocialGraph& g, const EdgeProbabilities& probs,
                         const std::vector<int>& seeds, int n_sims,
                         std::uint64_t stream_root);

}  // namespace tucb
