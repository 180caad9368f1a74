#include "tucb/seed_oracle.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace tucb {

namespace {

// CELF over an abstract monotone set function given by gain(v) relative to
// the committed set and add(v) committing a pick.
template <typename GainFn, typename AddFn>
std::vector<int> celf(int node_count, int k, GainFn&& gain, AddFn&& add) {
  struct Entry {
    double gain;
    int node;
    int evaluated_at;  // picks committed when gain was computed
  };
  struct Worse {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.gain != b.gain) return a.gain < b.gain;
      return a.node > b.node;  // lower id wins ties
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Worse> queue;
  for (int v = 0; v < node_count; ++v) queue.push({gain(v), v, 0});

  std::vector<int> picked;
  picked.reserve(k);
  while (static_cast<int>(picked.size()) < k) {
    Entry top = queue.top();
    queue.pop();
    if (top.evaluated_at == static_cast<int>(picked.size())) {
      add(top.node);
      picked.push_back(top.node);
    } else {
      top.gain = gain(top.node);
      top.evaluated_at = static_cast<int>(picked.size());
      queue.push(top);
    }
  }
  return picked;
}

// Presampled live-edge realizations with incrementally maintained
// activation masks: gain(v) counts nodes newly reachable from v averaged
// over realizations.
class McSpreadState {
 public:
  McSpreadState(const SocialGraph& g, const EdgeProbabilities& probs, int n_sims,
                std::uint64_t stream_root)
      : graph_(g), n_sims_(n_sims), fired_(static_cast<std::size_t>(n_sims) * g.edge_count()),
        active_(static_cast<std::size_t>(n_sims) * g.node_count, 0),
        visited_(g.node_count, 0) {
    for (int sim = 0; sim < n_sims; ++sim) {
      Rng rng = stream_rng(stream_root, {static_cast<std::uint64_t>(sim)});
      for (int e = 0; e < g.edge_count(); ++e) {
        fired_[static_cast<std::size_t>(sim) * g.edge_count() + e] = rng.bernoulli(probs[e]);
      }
    }
  }

  double gain(int v) {
    long long total = 0;
    for (int sim = 0; sim < n_sims_; ++sim) total += reach(sim, v, /*commit=*/false);
    return static_cast<double>(total) / n_sims_;
  }

  void add(int v) {
    for (int sim = 0; sim < n_sims_; ++sim) reach(sim, v, /*commit=*/true);
  }

 private:
  // Count nodes newly activated when v is added under realization sim.
  int reach(int sim, int v, bool commit) {
    char* active = active_.data() + static_cast<std::size_t>(sim) * graph_.node_count;
    const char* fired = fired_.data() + static_cast<std::size_t>(sim) * graph_.edge_count();
    if (active[v]) return 0;

    ++stamp_;
    stack_.clear();
    stack_.push_back(v);
    visited_[v] = stamp_;
    int count = 0;
    while (!stack_.empty()) {
      int u = stack_.back();
      stack_.pop_back();
      ++count;
      if (commit) active[u] = 1;
      for (int e : graph_.out_edges[u]) {
        if (!fired[e]) continue;
        int w = graph_.edges[e].dst;
        if (active[w] || visited_[w] == stamp_) continue;
        visited_[w] = stamp_;
        stack_.push_back(w);
      }
    }
    return count;
  }

  const SocialGraph& graph_;
  int n_sims_;
  std::vector<char> fired_;
  std::vector<char> active_;
  std::vector<int> visited_;
  std::vector<int> stack_;
  int stamp_ = 0;
};

}  // namespace

std::vector<int> greedy_seeds(const SocialGraph& g, const EdgeProbabilities& probs,
                              int k, int n_sims, std::uint64_t stream_root) {
  if (k < 1 || k > g.node_count) {
    throw std::invalid_argument("greedy_seeds: need 1 <= K <= |V|");
  }
  if (n_sims < 1) throw std::invalid_argument("greedy_seeds: n_sims must be >= 1");
  McSpreadState state(g, probs, n_sims, stream_root);
  return celf(
      g.node_count, k, [&](int v) { return state.gain(v); },
      [&](int v) { state.add(v); });
}

std::vector<int> greedy_seeds_exact(const SocialGraph& g, const EdgeProbabilities& probs,
                                    int k) {
  if (k < 1 || k > g.node_count) {
    throw std::invalid_argument("greedy_seeds_exact: need 1 <= K <= |V|");
  }
  std::vector<int> current;
  double current_spread = 0.0;
  std::vector<int> trial;
  return celf(
      g.node_count, k,
      [&](int v) {
        trial = current;
        trial.push_back(v);
        return exact_spread(g, probs, trial) - current_spread;
      },
      [&](int v) {
        current.push_back(v);
        current_spread = exact_spread(g, probs, current);
      });
}

std::vector<int> exhaustive_seeds(const SocialGraph& g, const EdgeProbabilities& probs,
                                  int k) {
  if (k < 1 || k > g.node_count) {
    throw std::invalid_argument("exhaustive_seeds: need 1 <= K <= |V|");
  }
  if (g.edge_count() > 20) {
    throw std::invalid_argument("exhaustive_seeds: enumeration guard (|E| <= 20) violated");
  }
  double combos = 1.0;
  for (int i = 0; i < k; ++i) combos *= static_cast<double>(g.node_count - i) / (i + 1);
  if (combos > 1e5) {
    throw std::invalid_argument("exhaustive_seeds: C(|V|, K) <= 1e5 guard violated");
  }

  std::vector<int> subset(k);
  for (int i = 0; i < k; ++i) subset[i] = i;
  std::vector<int> best;
  double best_spread = -1.0;
  while (true) {
    const double spread = exact_spread(g, probs, subset);
    if (spread > best_spread) {  // strict: first (lexicographically
      best_spread = spread;      // smallest) subset wins ties
      best = subset;
    }
    // next K-combination in lexicographic order
    int i = k - 1;
    while (i >= 0 && subset[i] == g.node_count - k + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }
  return best;
}

}  // namespace tucb
