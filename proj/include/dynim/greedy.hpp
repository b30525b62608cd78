#pragma once

#include <functional>
#include <vector>

#include "dynim/errors.hpp"
#include "dynim/graph.hpp"
#include "dynim/seedstate.hpp"

namespace dynim {

// Marginal-gain evaluator: gain(basis, u) where basis is the current seed set
// in inclusion order.
using GainFn = std::function<double(const std::vector<NodeId>&, NodeId)>;

// Hill-climbing greedy: repeatedly adds the argmax marginal-gain node until k
// seeds are selected. Every remaining candidate keeps its last evaluated gain
// in the queue.
inline SeedState greedy(const UncertainGraph& g, const std::vector<NodeId>& s_init,
                        std::size_t k, const GainFn& gain) {
  if (g.node_count() < k) {
    throw InsufficientNodes("graph has " + std::to_string(g.node_count()) +
                            " nodes, need " + std::to_string(k));
  }
  SeedState state;
  std::vector<NodeId> basis;
  for (NodeId s : s_init) {
    state.ordered.push_back({s, gain(basis, s)});
    basis.push_back(s);
  }

  std::vector<NodeId> candidates;
  for (NodeId u : g.nodes()) {
    if (std::find(basis.begin(), basis.end(), u) == basis.end()) {
      candidates.push_back(u);
    }
  }

  while (basis.size() < k) {
    NodeId best = kNoNode;
    double best_gain = 0.0;
    std::vector<double> gains(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      gains[i] = gain(basis, candidates[i]);
      if (best == kNoNode || better_candidate(gains[i], candidates[i], best_gain, best)) {
        best = candidates[i];
        best_gain = gains[i];
      }
    }
    state.ordered.push_back({best, best_gain});
    basis.push_back(best);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (candidates[i] == best) continue;
      state.queue.upsert(candidates[i], gains[i], false);
    }
    candidates.erase(std::find(candidates.begin(), candidates.end(), best));
  }
  return state;
}

// CELF: lazy greedy over a priority queue of cached gains. Produces the same
// seed set as greedy for any monotone submodular estimator; stale entries are
// upper bounds, so only queue tops are re-evaluated.
inline SeedState celf(const UncertainGraph& g, std::size_t k, const GainFn& gain) {
  if (g.node_count() < k) {
    throw InsufficientNodes("graph has " + std::to_string(g.node_count()) +
                            " nodes, need " + std::to_string(k));
  }
  SeedState state;
  if (k == 0) return state;

  std::vector<NodeId> basis;
  for (NodeId u : g.nodes()) {
    state.queue.upsert(u, gain(basis, u), true);
  }
  while (basis.size() < k) {
    auto top = state.queue.pop_best(
        [&](NodeId u) { return gain(basis, u); });
    state.queue.erase(top->node);
    state.ordered.push_back(*top);
    basis.push_back(top->node);
    state.queue.invalidate_all();
  }
  return state;
}

}  // namespace dynim
