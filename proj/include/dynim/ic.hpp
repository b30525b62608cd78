#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include "dynim/errors.hpp"
#include "dynim/graph.hpp"
#include "dynim/rng.hpp"

namespace dynim {

struct McStats {
  double mean = 0.0;
  double sample_stddev = 0.0;
  double standard_error = 0.0;
};

namespace detail {

// One independent cascade. Each newly active node gets a single chance per
// out-neighbor; a neighbor that is already active consumes no draw.
inline std::size_t run_cascade(const UncertainGraph& g,
                               const std::vector<NodeId>& seeds, RngStream& rng,
                               std::vector<std::uint32_t>& visit_mark,
                               std::uint32_t stamp,
                               std::vector<NodeId>& frontier,
                               std::vector<NodeId>& next) {
  frontier.clear();
  std::size_t activated = 0;
  for (NodeId s : seeds) {
    if (visit_mark[s] == stamp) continue;
    visit_mark[s] = stamp;
    frontier.push_back(s);
    ++activated;
  }
  while (!frontier.empty()) {
    next.clear();
    for (NodeId u : frontier) {
      for (const auto& [v, p] : g.out_edges(u)) {
        if (visit_mark[v] == stamp) continue;
        if (rng.uniform01() <= p) {
          visit_mark[v] = stamp;
          next.push_back(v);
          ++activated;
        }
      }
    }
    frontier.swap(next);
  }
  return activated;
}

}  // namespace detail

// Monte-Carlo spread estimate under the IC model. Simulation i draws from a
// stream keyed by (seed, i), so the result is independent of evaluation order
// and of the worker count.
inline McStats mc_spread_ic_stats(const UncertainGraph& g,
                                  const std::vector<NodeId>& seeds,
                                  std::size_t simulations, std::uint64_t seed,
                                  unsigned threads = 1) {
  if (simulations < 1) throw InvalidParam("simulation count must be >= 1");
  std::vector<NodeId> sorted(seeds);
  std::sort(sorted.begin(), sorted.end());
  for (NodeId s : sorted) {
    if (!g.alive(s)) throw MissingTarget("seed " + std::to_string(s) + " not present");
  }

  if (threads == 0) threads = 1;
  threads = std::min<unsigned>(threads, simulations);
  std::vector<std::int64_t> sums(threads, 0), squares(threads, 0);

  auto worker = [&](unsigned t) {
    std::vector<std::uint32_t> visit_mark(g.slot_count(), 0);
    std::vector<NodeId> frontier, next;
    std::int64_t sum = 0, sq = 0;
    for (std::size_t i = t; i < simulations; i += threads) {
      RngStream rng(mix(seed, rng_purpose::mc_sim, i));
      std::int64_t size = static_cast<std::int64_t>(detail::run_cascade(
          g, sorted, rng, visit_mark, static_cast<std::uint32_t>(i + 1), frontier, next));
      sum += size;
      sq += size * size;
    }
    sums[t] = sum;
    squares[t] = sq;
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  std::int64_t total = 0, total_sq = 0;
  for (unsigned t = 0; t < threads; ++t) {
    total += sums[t];
    total_sq += squares[t];
  }
  McStats stats;
  double r = static_cast<double>(simulations);
  stats.mean = static_cast<double>(total) / r;
  if (simulations > 1) {
    double var = (static_cast<double>(total_sq) - r * stats.mean * stats.mean) / (r - 1.0);
    stats.sample_stddev = std::sqrt(std::max(0.0, var));
    stats.standard_error = stats.sample_stddev / std::sqrt(r);
  }
  return stats;
}

inline double mc_spread_ic(const UncertainGraph& g, const std::vector<NodeId>& seeds,
                           std::size_t simulations, std::uint64_t seed,
                           unsigned threads = 1) {
  return mc_spread_ic_stats(g, seeds, simulations, seed, threads).mean;
}

// Exact IC spread by enumerating all 2^|E| live-edge worlds. Test oracle for
// the #P-hard quantity; refuses graphs with more than 20 edges.
inline double exact_spread_ic(const UncertainGraph& g, const std::vector<NodeId>& seeds) {
  struct Edge {
    NodeId u, v;
    double p;
  };
  std::vector<Edge> edges;
  for (NodeId u : g.nodes()) {
    for (const auto& [v, p] : g.out_edges(u)) edges.push_back({u, v, p});
  }
  if (edges.size() > 20) {
    throw TooLarge("exact_spread_ic limited to 20 edges, got " +
                   std::to_string(edges.size()));
  }
  std::vector<NodeId> sorted(seeds);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (NodeId s : sorted) {
    if (!g.alive(s)) throw MissingTarget("seed " + std::to_string(s) + " not present");
  }
  if (sorted.empty()) return 0.0;

  std::vector<std::vector<std::pair<std::size_t, NodeId>>> adj(g.slot_count());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    adj[edges[i].u].push_back({i, edges[i].v});
  }

  double total = 0.0;
  std::vector<std::uint32_t> mark(g.slot_count(), 0);
  std::vector<NodeId> stack;
  std::uint64_t worlds = 1ULL << edges.size();
  for (std::uint64_t mask = 0; mask < worlds; ++mask) {
    double prob = 1.0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      prob *= (mask >> i) & 1 ? edges[i].p : 1.0 - edges[i].p;
    }
    std::uint32_t stamp = static_cast<std::uint32_t>(mask + 1);
    std::size_t reached = 0;
    stack.assign(sorted.begin(), sorted.end());
    for (NodeId s : sorted) mark[s] = stamp;
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      ++reached;
      for (const auto& [idx, v] : adj[u]) {
        if (!((mask >> idx) & 1) || mark[v] == stamp) continue;
        mark[v] = stamp;
        stack.push_back(v);
      }
    }
    total += prob * static_cast<double>(reached);
  }
  return total;
}

// Spread estimator over a fixed set of live-edge worlds. World w's edge
// outcomes are a pure function of (seed, w, edge), so estimates for any two
// seed sets are coupled: the per-world reach is a coverage function, and the
// estimated influence is exactly monotone and submodular. That keeps lazy
// queue values valid upper bounds even though they are estimates.
class WorldEstimator {
 public:
  WorldEstimator(const UncertainGraph& g, std::size_t worlds, std::uint64_t seed)
      : g_(&g), worlds_(worlds), seed_(seed) {}

  void rebind(const UncertainGraph& g) {
    g_ = &g;
    basis_.clear();
    marks_.clear();
  }

  std::size_t worlds() const { return worlds_; }

  bool edge_live(std::size_t world, NodeId u, NodeId v, double p) const {
    return unit_draw(mix(seed_, rng_purpose::mc_world, world, edge_key(u, v))) <= p;
  }

  double sigma(const std::vector<NodeId>& basis) {
    ensure_basis(basis);
    return static_cast<double>(base_total_) / static_cast<double>(worlds_);
  }

  // Mean over worlds of |reach(u) \ reach(basis)|.
  double marginal(const std::vector<NodeId>& basis, NodeId u) {
    ensure_basis(basis);
    if (scratch_.size() != g_->slot_count()) {
      scratch_.assign(g_->slot_count(), 0);
      stamp_ = 0;
    }
    std::int64_t total = 0;
    std::vector<NodeId> stack;
    for (std::size_t w = 0; w < worlds_; ++w) {
      const auto& marked = marks_[w];
      if (marked[u]) continue;
      if (stamp_ == std::numeric_limits<std::uint32_t>::max()) {
        std::fill(scratch_.begin(), scratch_.end(), 0);
        stamp_ = 0;
      }
      std::uint32_t stamp = ++stamp_;
      stack.clear();
      stack.push_back(u);
      scratch_[u] = stamp;
      std::int64_t fresh = 0;
      while (!stack.empty()) {
        NodeId x = stack.back();
        stack.pop_back();
        ++fresh;
        for (const auto& [y, p] : g_->out_edges(x)) {
          if (scratch_[y] == stamp || marked[y]) continue;
          if (!edge_live(w, x, y, p)) continue;
          scratch_[y] = stamp;
          stack.push_back(y);
        }
      }
      total += fresh;
    }
    return static_cast<double>(total) / static_cast<double>(worlds_);
  }

  double sigma_single(NodeId u) { return marginal({}, u); }

 private:
  void ensure_basis(const std::vector<NodeId>& basis) {
    std::vector<NodeId> sorted(basis);
    std::sort(sorted.begin(), sorted.end());
    if (!marks_.empty() && sorted == basis_) return;
    basis_ = std::move(sorted);
    marks_.assign(worlds_, std::vector<std::uint8_t>(g_->slot_count(), 0));
    base_total_ = 0;
    std::vector<NodeId> stack;
    for (std::size_t w = 0; w < worlds_; ++w) {
      auto& marked = marks_[w];
      stack.clear();
      for (NodeId s : basis_) {
        if (marked[s]) continue;
        marked[s] = 1;
        stack.push_back(s);
      }
      while (!stack.empty()) {
        NodeId x = stack.back();
        stack.pop_back();
        ++base_total_;
        for (const auto& [y, p] : g_->out_edges(x)) {
          if (marked[y] || !edge_live(w, x, y, p)) continue;
          marked[y] = 1;
          stack.push_back(y);
        }
      }
    }
  }

  const UncertainGraph* g_;
  std::size_t worlds_;
  std::uint64_t seed_;
  std::vector<NodeId> basis_;
  std::vector<std::vector<std::uint8_t>> marks_;
  std::vector<std::uint32_t> scratch_;
  std::uint32_t stamp_ = 0;
  std::int64_t base_total_ = 0;
};

}  // namespace dynim
