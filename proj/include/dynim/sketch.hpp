#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "dynim/errors.hpp"
#include "dynim/graph.hpp"
#include "dynim/rng.hpp"
#include "dynim/seedstate.hpp"

namespace dynim {

// Reverse-reachable sketch: a random target z, the record of examined edge
// outcomes x, and the set H of nodes reaching z through live edges. The
// weight counts edges examined while building (and later extending) H.
struct Sketch {
  std::uint64_t id = 0;
  NodeId target = kNoNode;
  std::vector<NodeId> reached;                               // H, sorted
  std::vector<std::pair<std::uint64_t, std::uint8_t>> examined;  // x, sorted by edge key
  std::uint64_t weight = 0;
  bool live = true;  // true: in index I (no seed in H); false: retired in R

  bool contains(NodeId u) const {
    return std::binary_search(reached.begin(), reached.end(), u);
  }

  bool meets(const std::vector<NodeId>& sorted_set) const {
    // Both sides sorted; walk the smaller one.
    for (NodeId s : sorted_set) {
      if (contains(s)) return true;
    }
    return false;
  }

  const std::uint8_t* examined_outcome(std::uint64_t key) const {
    auto it = std::lower_bound(
        examined.begin(), examined.end(), key,
        [](const auto& e, std::uint64_t k) { return e.first < k; });
    if (it == examined.end() || it->first != key) return nullptr;
    return &it->second;
  }
};

// Live/retired sketch partition with per-node postings. Liveness of an edge
// inside sketch j is a pure function of (run seed, j, edge), so sketches can
// be extended or re-examined after graph updates without storing generator
// state.
class SketchIndex {
 public:
  SketchIndex(double beta, std::uint64_t seed) : beta_(beta), seed_(seed) {
    if (beta < 1.0) throw InvalidParam("beta must be >= 1");
  }

  static double tau_for(const UncertainGraph& g, double beta) {
    double n = static_cast<double>(g.node_count());
    double m = static_cast<double>(g.edge_count());
    return beta * (n + m) * std::log2(std::max(2.0, n));
  }

  double tau() const { return tau_; }
  double beta() const { return beta_; }
  std::uint64_t total_weight() const { return total_weight_; }
  std::size_t size() const { return sketches_.size(); }

  std::size_t live_count() const {
    std::size_t c = 0;
    for (const auto& [id, sk] : sketches_) c += sk.live;
    return c;
  }
  std::size_t retired_count() const { return sketches_.size() - live_count(); }

  const std::map<std::uint64_t, Sketch>& sketches() const { return sketches_; }

  // Generates sketches until the examined-edge budget tau is exceeded.
  // Routing against `seeds` puts sketches whose H meets a seed into R.
  void build(const UncertainGraph& g, const std::vector<NodeId>& seeds = {}) {
    if (g.node_count() == 0) throw EmptyGraph("cannot sketch an empty graph");
    tau_ = tau_for(g, beta_);
    std::vector<NodeId> sorted(seeds);
    std::sort(sorted.begin(), sorted.end());
    while (static_cast<double>(total_weight_) <= tau_) {
      generate_one(g, sorted);
    }
  }

  // Coverage-based marginal gain: sketches not covered by `basis` that
  // contain u, scaled to spread units.
  double coverage_gain(const UncertainGraph& g, const std::vector<NodeId>& sorted_basis,
                       NodeId u) const {
    std::size_t count = 0;
    auto it = postings_.find(u);
    if (it != postings_.end()) {
      for (std::uint64_t id : it->second) {
        const Sketch* sk = find(id);
        if (!sk || !sk->contains(u)) continue;
        if (sk->meets(sorted_basis)) continue;
        ++count;
      }
    }
    return scale(g, count);
  }

  // Max-coverage selection of k seeds over the live index; covered sketches
  // are retired to R, not deleted.
  std::vector<SeedEntry> select(const UncertainGraph& g, std::size_t k) {
    if (g.node_count() < k) {
      throw InsufficientNodes("graph has " + std::to_string(g.node_count()) +
                              " nodes, need " + std::to_string(k));
    }
    std::vector<SeedEntry> picked;
    for (std::size_t round = 0; round < k; ++round) {
      std::map<NodeId, std::size_t> counts;
      for (const auto& [id, sk] : sketches_) {
        if (!sk.live) continue;
        for (NodeId u : sk.reached) ++counts[u];
      }
      NodeId best = kNoNode;
      std::size_t best_count = 0;
      for (NodeId u : g.nodes()) {
        bool taken = false;
        for (const auto& e : picked) taken |= e.node == u;
        if (taken) continue;
        std::size_t c = 0;
        auto it = counts.find(u);
        if (it != counts.end()) c = it->second;
        if (best == kNoNode ||
            better_candidate(static_cast<double>(c), u, static_cast<double>(best_count), best)) {
          best = u;
          best_count = c;
        }
      }
      picked.push_back({best, scale(g, best_count)});
      retire_containing(best);
    }
    return picked;
  }

  // Moves I-sketches whose H meets `seeds` to R (after seed selection).
  void retire_covered(const std::vector<NodeId>& seeds) {
    std::vector<NodeId> sorted(seeds);
    std::sort(sorted.begin(), sorted.end());
    for (auto& [id, sk] : sketches_) {
      if (sk.live && sk.meets(sorted)) sk.live = false;
    }
  }

  // Sketch swapping: retired sketches that contain no remaining seed return
  // to the live index.
  void swap_for_remaining(const std::vector<NodeId>& s_rem) {
    std::vector<NodeId> sorted(s_rem);
    std::sort(sorted.begin(), sorted.end());
    for (auto& [id, sk] : sketches_) {
      if (!sk.live && !sk.meets(sorted)) sk.live = true;
    }
  }

  // Sketch maintenance for one graph update, applied against the updated
  // graph. Expansion and shrinking re-derive edge liveness from the keyed
  // draws, so probability changes reuse each sketch's frozen randomness.
  void apply_op(const UncertainGraph& g_new, const UpdateOp& op,
                const std::vector<NodeId>& seeds) {
    std::vector<NodeId> sorted(seeds);
    std::sort(sorted.begin(), sorted.end());
    switch (op.kind) {
      case UpdateKind::EdgeAdd:
      case UpdateKind::EdgeProbIncrease:
        expand_edge(g_new, op.u, op.v, op.p, sorted);
        break;
      case UpdateKind::EdgeDelete:
        weaken_edge(g_new, op.u, op.v, 0.0, true, sorted);
        break;
      case UpdateKind::EdgeProbDecrease:
        weaken_edge(g_new, op.u, op.v, op.p, false, sorted);
        break;
      case UpdateKind::NodeDelete:
        drop_node(g_new, op.u, sorted);
        break;
      case UpdateKind::NodeAdd:
        break;
    }
    enforce_budget(g_new, sorted);
  }

  // Delete most recent sketches while the weight excluding the newest
  // exceeds tau, then add new sketches while under tau.
  void enforce_budget(const UncertainGraph& g, const std::vector<NodeId>& sorted_seeds) {
    tau_ = tau_for(g, beta_);
    while (!sketches_.empty()) {
      std::uint64_t last_weight = sketches_.rbegin()->second.weight;
      if (static_cast<double>(total_weight_ - last_weight) <= tau_) break;
      erase_sketch(std::prev(sketches_.end()));
    }
    while (static_cast<double>(total_weight_) <= tau_) {
      generate_one(g, sorted_seeds);
    }
  }

  // Partition and budget invariants; throws IndexCorrupt on violation.
  void audit(const std::vector<NodeId>& seeds) const {
    std::vector<NodeId> sorted(seeds);
    std::sort(sorted.begin(), sorted.end());
    std::uint64_t weight = 0, max_weight = 0;
    for (const auto& [id, sk] : sketches_) {
      weight += sk.weight;
      max_weight = std::max(max_weight, sk.weight);
      if (!sk.contains(sk.target)) {
        throw IndexCorrupt("sketch " + std::to_string(id) + " lost its target");
      }
      if (sk.live && sk.meets(sorted)) {
        throw IndexCorrupt("live sketch " + std::to_string(id) + " contains a seed");
      }
      if (!sk.live && !sk.meets(sorted)) {
        throw IndexCorrupt("retired sketch " + std::to_string(id) + " has no seed");
      }
    }
    if (weight != total_weight_) throw IndexCorrupt("weight accounting drifted");
    if (!sketches_.empty() &&
        static_cast<double>(total_weight_) > tau_ + static_cast<double>(max_weight)) {
      throw IndexCorrupt("weight budget exceeded");
    }
  }

 private:
  const Sketch* find(std::uint64_t id) const {
    auto it = sketches_.find(id);
    return it == sketches_.end() ? nullptr : &it->second;
  }

  double scale(const UncertainGraph& g, std::size_t count) const {
    if (sketches_.empty()) return 0.0;
    return static_cast<double>(count) * static_cast<double>(g.node_count()) /
           static_cast<double>(sketches_.size());
  }

  bool edge_draw_live(std::uint64_t sketch_id, std::uint64_t key, double p) const {
    return unit_draw(mix(seed_, rng_purpose::sketch_edge, sketch_id, key)) <= p;
  }

  void retire_containing(NodeId u) {
    auto it = postings_.find(u);
    if (it == postings_.end()) return;
    for (std::uint64_t id : it->second) {
      auto sit = sketches_.find(id);
      if (sit != sketches_.end() && sit->second.contains(u)) sit->second.live = false;
    }
  }

  void generate_one(const UncertainGraph& g, const std::vector<NodeId>& sorted_seeds) {
    std::vector<NodeId> alive = g.nodes();
    std::uint64_t id = next_id_++;
    RngStream target_rng(mix(seed_, rng_purpose::sketch_target, id));
    Sketch sk;
    sk.id = id;
    sk.target = alive[target_rng.below(alive.size())];
    sk.reached.push_back(sk.target);

    std::vector<NodeId> frontier{sk.target};
    std::vector<NodeId> in_h{sk.target};
    while (!frontier.empty()) {
      std::vector<NodeId> next;
      for (NodeId w : frontier) {
        for (const auto& [x, p] : g.in_edges(w)) {
          std::uint64_t key = edge_key(x, w);
          bool live = edge_draw_live(id, key, p);
          sk.examined.push_back({key, static_cast<std::uint8_t>(live)});
          ++sk.weight;
          if (!live) continue;
          if (std::find(in_h.begin(), in_h.end(), x) != in_h.end()) continue;
          in_h.push_back(x);
          next.push_back(x);
        }
      }
      frontier = std::move(next);
    }
    sk.reached = in_h;
    std::sort(sk.reached.begin(), sk.reached.end());
    std::sort(sk.examined.begin(), sk.examined.end());
    sk.examined.erase(std::unique(sk.examined.begin(), sk.examined.end(),
                                  [](const auto& a, const auto& b) {
                                    return a.first == b.first;
                                  }),
                      sk.examined.end());
    sk.live = !sk.meets(sorted_seeds);

    total_weight_ += sk.weight;
    for (NodeId u : sk.reached) postings_[u].push_back(id);
    sketches_.emplace(id, std::move(sk));
  }

  void erase_sketch(std::map<std::uint64_t, Sketch>::iterator it) {
    total_weight_ -= it->second.weight;
    // Postings are cleaned lazily; readers verify membership.
    sketches_.erase(it);
  }

  void set_examined(Sketch& sk, std::uint64_t key, bool live) {
    auto it = std::lower_bound(
        sk.examined.begin(), sk.examined.end(), key,
        [](const auto& e, std::uint64_t k) { return e.first < k; });
    if (it != sk.examined.end() && it->first == key) {
      it->second = static_cast<std::uint8_t>(live);
    } else {
      sk.examined.insert(it, {key, static_cast<std::uint8_t>(live)});
      ++sk.weight;
      ++total_weight_;
    }
  }

  // New or strengthened edge (u,v): sketches containing v may now be reached
  // by u and everything behind it.
  void expand_edge(const UncertainGraph& g, NodeId u, NodeId v, double p,
                   const std::vector<NodeId>& sorted_seeds) {
    auto it = postings_.find(v);
    if (it == postings_.end()) return;
    std::vector<std::uint64_t> ids = it->second;
    for (std::uint64_t id : ids) {
      auto sit = sketches_.find(id);
      if (sit == sketches_.end() || !sit->second.contains(v)) continue;
      Sketch& sk = sit->second;
      std::uint64_t key = edge_key(u, v);
      bool live = edge_draw_live(id, key, p);
      set_examined(sk, key, live);
      if (!live || sk.contains(u)) continue;

      // Reverse BFS from u over live edges, extending H.
      std::vector<NodeId> added{u};
      std::vector<NodeId> frontier{u};
      while (!frontier.empty()) {
        std::vector<NodeId> next;
        for (NodeId w : frontier) {
          for (const auto& [x, q] : g.in_edges(w)) {
            std::uint64_t k2 = edge_key(x, w);
            bool l2 = edge_draw_live(id, k2, q);
            set_examined(sk, k2, l2);
            if (!l2 || sk.contains(x)) continue;
            if (std::find(added.begin(), added.end(), x) != added.end()) continue;
            added.push_back(x);
            next.push_back(x);
          }
        }
        frontier = std::move(next);
      }
      for (NodeId x : added) {
        sk.reached.insert(
            std::lower_bound(sk.reached.begin(), sk.reached.end(), x), x);
        auto& plist = postings_[x];
        if (std::find(plist.begin(), plist.end(), id) == plist.end()) {
          plist.push_back(id);
        }
      }
      if (sk.live && sk.meets(sorted_seeds)) sk.live = false;
    }
  }

  // Weakened or deleted edge (u,v): recompute H from the recorded liveness.
  void weaken_edge(const UncertainGraph& g, NodeId u, NodeId v, double p,
                   bool deleted, const std::vector<NodeId>& sorted_seeds) {
    auto it = postings_.find(v);
    if (it == postings_.end()) return;
    std::vector<std::uint64_t> ids = it->second;
    std::uint64_t key = edge_key(u, v);
    for (std::uint64_t id : ids) {
      auto sit = sketches_.find(id);
      if (sit == sketches_.end() || !sit->second.contains(v)) continue;
      Sketch& sk = sit->second;
      const std::uint8_t* rec = sk.examined_outcome(key);
      if (!rec) continue;
      bool was_live = *rec != 0;
      bool now_live = !deleted && edge_draw_live(id, key, p);
      if (was_live == now_live) continue;
      set_examined(sk, key, now_live);
      if (!was_live) continue;
      recompute_reached(g, sk, sorted_seeds);
    }
  }

  void drop_node(const UncertainGraph& g, NodeId u,
                 const std::vector<NodeId>& sorted_seeds) {
    auto it = postings_.find(u);
    if (it == postings_.end()) return;
    std::vector<std::uint64_t> ids = it->second;
    for (std::uint64_t id : ids) {
      auto sit = sketches_.find(id);
      if (sit == sketches_.end() || !sit->second.contains(u)) continue;
      if (sit->second.target == u) {
        erase_sketch(sit);
        continue;
      }
      recompute_reached(g, sit->second, sorted_seeds);
    }
    postings_.erase(u);
  }

  // H := nodes reaching the target through currently recorded live edges
  // that still exist. Never grows H, so no new edges are examined.
  void recompute_reached(const UncertainGraph& g, Sketch& sk,
                         const std::vector<NodeId>& sorted_seeds) {
    std::vector<NodeId> in_h{sk.target};
    std::vector<NodeId> frontier{sk.target};
    while (!frontier.empty()) {
      std::vector<NodeId> next;
      for (NodeId w : frontier) {
        if (!g.alive(w)) continue;
        for (const auto& [x, q] : g.in_edges(w)) {
          const std::uint8_t* rec = sk.examined_outcome(edge_key(x, w));
          if (!rec || !*rec) continue;
          if (std::find(in_h.begin(), in_h.end(), x) != in_h.end()) continue;
          in_h.push_back(x);
          next.push_back(x);
        }
      }
      frontier = std::move(next);
    }
    std::sort(in_h.begin(), in_h.end());
    sk.reached = std::move(in_h);
    sk.live = !sk.meets(sorted_seeds);
  }

  std::map<std::uint64_t, Sketch> sketches_;
  std::unordered_map<NodeId, std::vector<std::uint64_t>> postings_;
  double beta_;
  double tau_ = 0.0;
  std::uint64_t seed_;
  std::uint64_t next_id_ = 0;
  std::uint64_t total_weight_ = 0;
};

// Spec-shaped constructors for the static pipeline.
inline SketchIndex build_rr_index(const UncertainGraph& g, std::size_t /*k*/,
                                  double beta, std::uint64_t seed) {
  SketchIndex idx(beta, seed);
  idx.build(g);
  return idx;
}

inline SeedState select_seeds_rrs(SketchIndex& idx, const UncertainGraph& g,
                                  std::size_t k) {
  SeedState state;
  for (const auto& e : idx.select(g, k)) state.ordered.push_back(e);
  for (NodeId u : g.nodes()) {
    if (state.is_seed(u)) continue;
    state.queue.upsert(u, idx.coverage_gain(g, state.seed_set(), u), false);
  }
  return state;
}

}  // namespace dynim
