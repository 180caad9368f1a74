#include "tucb/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tucb {

namespace {

void check_seeds(const SocialGraph& g, const std::vector<int>& seeds) {
  for (int s : seeds) {
    if (s < 0 || s >= g.node_count) {
      throw std::invalid_argument("seed node " + std::to_string(s) + " out of range");
    }
  }
}

void check_probs(const SocialGraph& g, const EdgeProbabilities& probs) {
  if (static_cast<int>(probs.size()) != g.edge_count()) {
    throw std::invalid_argument("edge probability map incomplete over the edge set");
  }
}

}  // namespace

SocialGraph make_graph(int node_count, const std::vector<std::pair<int, int>>& edges,
                       GraphLoadStats* stats) {
  GraphLoadStats local;
  SocialGraph g;
  g.node_count = node_count;
  std::set<std::pair<int, int>> seen;
  for (const auto& [src, dst] : edges) {
    if (src < 0 || dst < 0) throw std::invalid_argument("negative node id in edge list");
    g.node_count = std::max(g.node_count, std::max(src, dst) + 1);
    if (src == dst) {
      ++local.self_loops_dropped;
      continue;
    }
    if (!seen.insert({src, dst}).second) {
      ++local.duplicates_dropped;
      continue;
    }
    g.edges.push_back({src, dst});
  }
  g.out_edges.assign(g.node_count, {});
  for (int e = 0; e < g.edge_count(); ++e) {
    g.out_edges[g.edges[e].src].push_back(e);
  }
  if (stats) *stats = local;
  return g;
}

SocialGraph load_graph(std::istream& in, GraphLoadStats* stats) {
  std::vector<std::pair<int, int>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv(line);
    std::size_t first = sv.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || sv[first] == '#') continue;
    std::istringstream fields{line};
    long long src = 0, dst = 0;
    std::string extra;
    if (!(fields >> src >> dst) || (fields >> extra) || src < 0 || dst < 0) {
      throw std::runtime_error("graph parse error at line " + std::to_string(line_no) +
                               ": expected \"src<TAB>dst\" with integer ids");
    }
    rows.emplace_back(static_cast<int>(src), static_cast<int>(dst));
  }
  return make_graph(0, rows, stats);
}

SocialGraph load_graph_file(const std::string& path, GraphLoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file " + path);
  return load_graph(in, stats);
}

SocialGraph random_graph(int node_count, double mean_out_degree, Rng& rng) {
  if (node_count < 2) throw std::invalid_argument("random_graph: need at least 2 nodes");
  const double p = std::min(1.0, mean_out_degree / (node_count - 1));
  std::vector<std::pair<int, int>> rows;
  for (int i = 0; i < node_count; ++i) {
    for (int j = 0; j < node_count; ++j) {
      if (i == j) continue;
      if (rng.bernoulli(p)) rows.emplace_back(i, j);
    }
  }
  return make_graph(node_count, rows);
}

CascadeOutcome simulate_cascade(const SocialGraph& g, const EdgeProbabilities& probs,
                                const std::vector<int>& seeds, Rng& rng) {
  check_probs(g, probs);
  check_seeds(g, seeds);

  CascadeOutcome out;
  std::vector<char> active(g.node_count, 0);
  std::vector<int> frontier;
  for (int s : seeds) {
    if (!active[s]) {
      active[s] = 1;
      frontier.push_back(s);
      out.activated.push_back(s);
    }
  }
  std::vector<int> next;
  while (!frontier.empty()) {
    next.clear();
    for (int u : frontier) {
      for (int e : g.out_edges[u]) {
        const bool fired = rng.bernoulli(probs[e]);
        out.edge_trials.emplace_back(e, fired);
        const int v = g.edges[e].dst;
        if (fired && !active[v]) {
          active[v] = 1;
          next.push_back(v);
          out.activated.push_back(v);
        }
      }
    }
    frontier.swap(next);
  }
  return out;
}

double exact_spread(const SocialGraph& g, const EdgeProbabilities& probs,
                    const std::vector<int>& seeds) {
  check_probs(g, probs);
  check_seeds(g, seeds);
  const int m = g.edge_count();
  if (m > 20) {
    throw std::invalid_argument("exact_spread: enumeration guard (|E| <= 20) violated");
  }

  std::vector<char> active(g.node_count, 0);
  std::vector<int> stack;
  double expected = 0.0;
  for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
    double weight = 1.0;
    for (int e = 0; e < m; ++e) {
      weight *= (mask >> e) & 1 ? probs[e] : 1.0 - probs[e];
    }
    if (weight == 0.0) continue;

    std::fill(active.begin(), active.end(), 0);
    stack.clear();
    int count = 0;
    for (int s : seeds) {
      if (!active[s]) {
        active[s] = 1;
        stack.push_back(s);
        ++count;
      }
    }
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int e : g.out_edges[u]) {
        if (!((mask >> e) & 1)) continue;
        int v = g.edges[e].dst;
        if (!active[v]) {
          active[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    expected += weight * count;
  }
  return expected;
}

SpreadEstimate mc_spread(const SocialGraph& g, const EdgeProbabilities& probs,
                         const std::vector<int>& seeds, int n_sims,
                         std::uint64_t stream_root) {
  check_probs(g, probs);
  check_seeds(g, seeds);
  if (n_sims < 1) throw std::invalid_argument("mc_spread: n_sims must be >= 1");

  double sum = 0.0, sum_sq = 0.0;
  std::vector<char> active(g.node_count, 0);
  std::vector<int> frontier, next;
  for (int sim = 0; sim < n_sims; ++sim) {
    Rng rng = stream_rng(stream_root, {static_cast<std::uint64_t>(sim)});
    std::fill(active.begin(), active.end(), 0);
    frontier.clear();
    int count = 0;
    for (int s : seeds) {
      if (!active[s]) {
        active[s] = 1;
        frontier.push_back(s);
        ++count;
      }
    }
    while (!frontier.empty()) {
      next.clear();
      for (int u : frontier) {
        for (int e : g.out_edges[u]) {
          const int v = g.edges[e].dst;
          if (rng.bernoulli(probs[e]) && !active[v]) {
            active[v] = 1;
            next.push_back(v);
            ++count;
          }
        }
      }
      frontier.swap(next);
    }
    sum += count;
    sum_sq += static_cast<double>(count) * count;
  }

  SpreadEstimate est;
  est.mean = sum / n_sims;
  if (n_sims > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / n_sims) / (n_sims - 1));
    est.stderr = std::sqrt(var / n_sims);
  }
  return est;
}

}  // namespace tucb
