#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "dynim/errors.hpp"
#include "dynim/family.hpp"
#include "dynim/graph.hpp"
#include "dynim/greedy.hpp"
#include "dynim/ic.hpp"
#include "dynim/mia.hpp"
#include "dynim/seedstate.hpp"
#include "dynim/sketch.hpp"

namespace dynim {

enum class Mode { MiaExact, FCelf, FRrs };

struct SessionConfig {
  Mode mode = Mode::MiaExact;
  double theta = 0.1;
  std::size_t k = 30;
  int max_n = 2;                 // MIA-exact sessions force unbounded
  std::uint64_t seed = 1;
  std::size_t mc_worlds = 10000;  // estimation worlds for F-CELF
  double beta = 32.0;             // sketch budget multiplier for F-RRS
  bool dwa = false;               // expand structural ops per the DWA model
};

struct UpdateStats {
  std::size_t replacement_iterations = 0;
  std::size_t tir_size = 0;
  int terminated_at = 0;
  std::size_t infected_seeds = 0;
  std::size_t batch_ops = 0;
  bool lemma7_ok = true;  // every evicted seed was last-of-S_rem or the last new seed
};

// One evolving-graph session: holds the current graph, the seed state with
// its persistent priority queue, and the mode-specific estimator state.
// After construction and after every apply() the seed set has exactly k
// members.
class DynamicSession {
 public:
  DynamicSession(UncertainGraph graph, SessionConfig cfg)
      : g_(std::move(graph)), cfg_(cfg) {
    if (cfg_.mode == Mode::MiaExact) cfg_.max_n = kUnboundedLevels;
    Theta theta(cfg_.theta);
    switch (cfg_.mode) {
      case Mode::MiaExact: {
        SpreadEvaluator eval(g_, theta);
        state_ = celf(g_, cfg_.k, [&](const std::vector<NodeId>& basis, NodeId u) {
          return eval.marginal_gain(basis, u);
        });
        break;
      }
      case Mode::FCelf: {
        est_ = std::make_unique<WorldEstimator>(g_, cfg_.mc_worlds, cfg_.seed);
        state_ = celf(g_, cfg_.k, [&](const std::vector<NodeId>& basis, NodeId u) {
          return est_->marginal(basis, u);
        });
        break;
      }
      case Mode::FRrs: {
        index_ = std::make_unique<SketchIndex>(cfg_.beta, cfg_.seed);
        index_->build(g_);
        state_ = select_seeds_rrs(*index_, g_, cfg_.k);
        break;
      }
    }
  }

  const UncertainGraph& graph() const { return g_; }
  const SeedState& state() const { return state_; }
  const SessionConfig& config() const { return cfg_; }
  const UpdateStats& last_stats() const { return stats_; }
  const SketchIndex* index() const { return index_.get(); }
  std::size_t epoch() const { return epoch_; }

  std::vector<NodeId> seeds() const { return state_.seed_set(); }

  void apply(const UpdateOp& op) { apply_batch({op}); }

  void apply_batch(const std::vector<UpdateOp>& raw_ops) {
    std::vector<UpdateOp> ops = raw_ops;
    if (cfg_.dwa) ops = dwa_expand_batch(g_, ops);
    UpdateBatch batch = coalesce_batch(ops, &g_);
    if (batch.ops.empty()) {
      stats_ = UpdateStats{};
      ++epoch_;
      return;
    }

    UncertainGraph g_old = g_;
    for (const auto& op : batch.ops) apply_update(g_, op);
    ++epoch_;

    if (cfg_.mode == Mode::FRrs) {
      UncertainGraph scratch = g_old;
      std::vector<NodeId> old_seeds = state_.seed_set();
      for (const auto& op : batch.ops) {
        apply_update(scratch, op);
        index_->apply_op(scratch, op, old_seeds);
      }
    }
    if (est_) est_->rebind(g_);

    Theta theta(cfg_.theta);
    FamilyContext old_ctx(g_old, theta), new_ctx(g_, theta);
    InfectedRegion region =
        tir_batch(old_ctx, new_ctx, batch, state_.seed_set(), cfg_.max_n);

    run_nfamily(region, new_ctx, batch.ops.size());
  }

 private:
  double gain_of(const std::vector<NodeId>& basis, NodeId u) {
    switch (cfg_.mode) {
      case Mode::MiaExact:
        return eval_->marginal_gain(basis, u);
      case Mode::FCelf:
        return est_->marginal(basis, u);
      case Mode::FRrs: {
        std::vector<NodeId> sorted(basis);
        std::sort(sorted.begin(), sorted.end());
        return index_->coverage_gain(g_, sorted, u);
      }
    }
    return 0.0;
  }

  // Cheap queue refresh value: sigma({u}) in the mode's own units, an upper
  // bound on any marginal gain by submodularity.
  double sigma_upper(NodeId u) {
    switch (cfg_.mode) {
      case Mode::MiaExact:
        return eval_->marginal_gain({}, u);
      case Mode::FCelf:
        return est_->sigma_single(u);
      case Mode::FRrs:
        return index_->coverage_gain(g_, {}, u);
    }
    return 0.0;
  }

  // Greedy restricted to the members of `nodes`: fresh inclusion order and
  // gains on the current graph.
  std::vector<SeedEntry> restricted_greedy(std::vector<NodeId> remaining) {
    std::vector<SeedEntry> order;
    std::vector<NodeId> basis;
    while (!remaining.empty()) {
      NodeId best = kNoNode;
      double best_gain = 0.0;
      for (NodeId u : remaining) {
        double gain = gain_of(basis, u);
        if (best == kNoNode || better_candidate(gain, u, best_gain, best)) {
          best = u;
          best_gain = gain;
        }
      }
      order.push_back({best, best_gain});
      basis.push_back(best);
      remaining.erase(std::find(remaining.begin(), remaining.end(), best));
    }
    return order;
  }

  // Next seed given the current basis. MIA-exact and F-CELF take the lazily
  // re-evaluated queue top; F-RRS runs max-coverage directly over the live
  // sketches.
  SeedEntry select_next(const std::vector<NodeId>& basis) {
    if (cfg_.mode == Mode::FRrs) {
      std::vector<NodeId> sorted(basis);
      std::sort(sorted.begin(), sorted.end());
      NodeId best = kNoNode;
      double best_gain = 0.0;
      for (NodeId u : g_.nodes()) {
        if (std::binary_search(sorted.begin(), sorted.end(), u)) continue;
        double gain = index_->coverage_gain(g_, sorted, u);
        if (best == kNoNode || better_candidate(gain, u, best_gain, best)) {
          best = u;
          best_gain = gain;
        }
      }
      if (best == kNoNode) throw InsufficientNodes("no candidate nodes left");
      state_.queue.erase(best);
      return {best, best_gain};
    }
    auto top = state_.queue.pop_best([&](NodeId u) { return gain_of(basis, u); });
    if (!top) throw InsufficientNodes("queue exhausted before k seeds");
    state_.queue.erase(top->node);
    return *top;
  }

  void run_nfamily(const InfectedRegion& region, FamilyContext& new_ctx,
                   std::size_t batch_ops) {
    stats_ = UpdateStats{};
    stats_.tir_size = region.tir.size();
    stats_.terminated_at = region.terminated_at;
    stats_.infected_seeds = region.infected_seeds.size();
    stats_.batch_ops = batch_ops;

    std::unique_ptr<SpreadEvaluator> eval_guard;
    if (cfg_.mode == Mode::MiaExact) {
      eval_guard = std::make_unique<SpreadEvaluator>(g_, Theta(cfg_.theta));
      eval_ = eval_guard.get();
    }

    // Line 1: S_rem keeps the surviving seeds in inclusion order. A deleted
    // seed node is always inside TIR, but purge defensively either way.
    std::vector<SeedEntry> s_rem;
    for (const auto& e : state_.ordered) {
      if (!g_.alive(e.node)) continue;
      if (region.contains(e.node)) continue;
      s_rem.push_back(e);
    }
    const std::size_t k_prime = s_rem.size();

    for (const auto& e : state_.queue.entries()) {
      if (!g_.alive(e.node)) state_.queue.erase(e.node);
    }

    if (cfg_.mode == Mode::FRrs) {
      std::vector<NodeId> rem_nodes;
      for (const auto& e : s_rem) rem_nodes.push_back(e.node);
      index_->swap_for_remaining(rem_nodes);
    }

    // Lines 2-4: every node in TIR re-enters the queue with sigma({u}).
    for (NodeId u : region.tir) {
      if (!g_.alive(u)) continue;
      bool in_rem = false;
      for (const auto& e : s_rem) in_rem |= e.node == u;
      if (in_rem) continue;
      state_.queue.upsert(u, sigma_upper(u), false);
    }
    state_.queue.invalidate_all();

    std::vector<SeedEntry> basis = s_rem;
    std::vector<SeedEntry> s_order;
    while (true) {
      // Line 6: extend to k seeds with Greedy.
      NodeId last_new = kNoNode;
      std::vector<NodeId> basis_nodes;
      for (const auto& e : basis) basis_nodes.push_back(e.node);
      while (basis.size() < cfg_.k) {
        SeedEntry next = select_next(basis_nodes);
        basis.push_back(next);
        basis_nodes.push_back(next.node);
        state_.queue.invalidate_all();
        last_new = next.node;
      }

      // Line 7: re-sort in greedy inclusion order on the updated graph.
      s_order = restricted_greedy(basis_nodes);

      // Line 8: w is the queue top, re-evaluated against S_order.
      std::vector<NodeId> order_nodes;
      for (const auto& e : s_order) order_nodes.push_back(e.node);
      state_.queue.invalidate_all();
      auto w = state_.queue.pop_best(
          [&](NodeId u) { return gain_of(order_nodes, u); });

      const SeedEntry& last = s_order.back();
      bool replace = w && better_candidate(w->gain, w->node, last.gain, last.node);
      if (!replace || stats_.replacement_iterations >= k_prime) {
        break;  // line 15
      }

      // Lines 10-12: evict the last seed and refresh its 2-family.
      ++stats_.replacement_iterations;
      NodeId evicted = last.node;
      bool was_last_rem = !s_rem.empty() && evicted == s_rem.back().node;
      stats_.lemma7_ok &= was_last_rem || evicted == last_new;

      s_order.pop_back();
      order_nodes.pop_back();
      state_.queue.invalidate_all();
      for (NodeId u : new_ctx.family2(evicted)) {
        if (!g_.alive(u)) continue;
        bool kept = false;
        for (NodeId s : order_nodes) kept |= s == u;
        if (kept) continue;
        if (cfg_.mode == Mode::MiaExact) {
          state_.queue.upsert(u, gain_of(order_nodes, u), true);
        } else {
          state_.queue.upsert(u, sigma_upper(u), false);
        }
      }
      basis = s_order;
    }

    state_.ordered = s_order;
    for (const auto& e : s_order) state_.queue.erase(e.node);

    if (cfg_.mode == Mode::FRrs) {
      index_->retire_covered(state_.seed_set());
      index_->audit(state_.seed_set());
    }
    eval_ = nullptr;
  }

  UncertainGraph g_;
  SessionConfig cfg_;
  SeedState state_;
  UpdateStats stats_;
  std::size_t epoch_ = 0;
  SpreadEvaluator* eval_ = nullptr;  // valid only inside run_nfamily
  std::unique_ptr<WorldEstimator> est_;
  std::unique_ptr<SketchIndex> index_;
};

// Spec-shaped wrappers over the session API.
inline SeedState nfamily_update(DynamicSession& session, const UpdateOp& op) {
  session.apply(op);
  return session.state();
}

inline SeedState nfamily_update_batch(DynamicSession& session,
                                      const std::vector<UpdateOp>& ops) {
  session.apply_batch(ops);
  return session.state();
}

inline SeedState fcelf_update(DynamicSession& session, const UpdateOp& op) {
  if (session.config().mode != Mode::FCelf) throw InvalidParam("session is not F-CELF");
  session.apply(op);
  return session.state();
}

inline SeedState frrs_update(DynamicSession& session, const UpdateOp& op) {
  if (session.config().mode != Mode::FRrs) throw InvalidParam("session is not F-RRS");
  session.apply(op);
  return session.state();
}

}  // namespace dynim
