#pragma once

#include <algorithm>
#include <limits>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dynim/graph.hpp"
#include "dynim/mia.hpp"

namespace dynim {

constexpr int kUnboundedLevels = std::numeric_limits<int>::max();

struct FamilySet {
  NodeId center = kNoNode;
  int order = 1;
  std::vector<NodeId> members;  // sorted
};

// Memoizes families for a single graph snapshot.
class FamilyContext {
 public:
  FamilyContext(const UncertainGraph& g, Theta theta) : eval_(g, theta) {}

  const UncertainGraph& graph() const { return eval_.graph(); }
  SpreadEvaluator& eval() { return eval_; }

  // F1(u) = MIIA(u) union MIOA(u).
  const std::vector<NodeId>& family1(NodeId u) {
    auto it = f1_.find(u);
    if (it != f1_.end()) return it->second;
    std::vector<NodeId> members = eval_.in_tree(u).node_set();
    for (const auto& m : eval_.out_tree(u).members) members.push_back(m.node);
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    return f1_.emplace(u, std::move(members)).first->second;
  }

  // F2(u) = union of F1(w) over w in F1(u).
  const std::vector<NodeId>& family2(NodeId u) {
    auto it = f2_.find(u);
    if (it != f2_.end()) return it->second;
    std::vector<NodeId> members;
    for (NodeId w : family1(u)) {
      const auto& f1w = family1(w);
      members.insert(members.end(), f1w.begin(), f1w.end());
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    return f2_.emplace(u, std::move(members)).first->second;
  }

 private:
  SpreadEvaluator eval_;
  std::unordered_map<NodeId, std::vector<NodeId>> f1_;
  std::unordered_map<NodeId, std::vector<NodeId>> f2_;
};

inline FamilySet family1(const UncertainGraph& g, NodeId u, Theta theta) {
  FamilyContext ctx(g, theta);
  return {u, 1, ctx.family1(u)};
}

inline FamilySet family2(const UncertainGraph& g, NodeId u, Theta theta) {
  FamilyContext ctx(g, theta);
  return {u, 2, ctx.family2(u)};
}

// First infected region: MIIA of the update origin, computed on the updated
// graph for additive updates and on the old graph for reductive ones.
inline std::vector<NodeId> one_ir(FamilyContext& old_ctx, FamilyContext& new_ctx,
                                  const UpdateOp& op) {
  FamilyContext& ctx =
      classify_update(op) == UpdateClass::Additive ? new_ctx : old_ctx;
  return ctx.eval().in_tree(op.origin()).node_set();
}

inline std::vector<NodeId> one_ir(const UncertainGraph& g_old,
                                  const UncertainGraph& g_new,
                                  const UpdateOp& op, Theta theta) {
  FamilyContext old_ctx(g_old, theta), new_ctx(g_new, theta);
  return one_ir(old_ctx, new_ctx, op);
}

// Second infected region. Additive: union of F2 over every node in 1-IR.
// Reductive: union of F2 over the old seed nodes inside 1-IR.
inline std::vector<NodeId> two_ir(FamilyContext& ctx, const std::vector<NodeId>& first,
                                  UpdateClass kind, const std::vector<NodeId>& seeds) {
  std::vector<NodeId> members;
  if (kind == UpdateClass::Additive) {
    for (NodeId u : first) {
      const auto& f2 = ctx.family2(u);
      members.insert(members.end(), f2.begin(), f2.end());
    }
  } else {
    for (NodeId s : first) {
      if (!std::binary_search(seeds.begin(), seeds.end(), s)) continue;
      const auto& f2 = ctx.family2(s);
      members.insert(members.end(), f2.begin(), f2.end());
    }
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return members;
}

inline std::vector<NodeId> two_ir(const UncertainGraph& g, const std::vector<NodeId>& first,
                                  UpdateClass kind, const std::vector<NodeId>& seeds,
                                  Theta theta) {
  FamilyContext ctx(g, theta);
  std::vector<NodeId> sorted(seeds);
  std::sort(sorted.begin(), sorted.end());
  return two_ir(ctx, first, kind, sorted);
}

struct InfectedRegion {
  std::vector<std::vector<NodeId>> levels;  // levels[0] is 1-IR; sorted sets
  std::vector<NodeId> tir;                  // sorted union of all levels
  int terminated_at = 0;
  std::vector<NodeId> infected_seeds;       // sorted; old seeds inside tir

  bool contains(NodeId u) const {
    return std::binary_search(tir.begin(), tir.end(), u);
  }
};

namespace detail {

inline void merge_into(std::vector<NodeId>& dst, const std::vector<NodeId>& src) {
  std::vector<NodeId> merged;
  merged.reserve(dst.size() + src.size());
  std::set_union(dst.begin(), dst.end(), src.begin(), src.end(),
                 std::back_inserter(merged));
  dst = std::move(merged);
}

// Seeds found in the 2-family of any member of `level` that were not
// expanded yet. Scanning 2-families (rather than the level set itself)
// guarantees that after termination no unexpanded seed is within two
// families of any infected node.
inline std::vector<NodeId> seeds_near_level(FamilyContext& ctx,
                                            const std::vector<NodeId>& level,
                                            const std::vector<NodeId>& seeds,
                                            std::unordered_set<NodeId>& expanded) {
  std::vector<NodeId> found;
  for (NodeId u : level) {
    const auto& f2 = ctx.family2(u);
    for (NodeId s : f2) {
      if (!std::binary_search(seeds.begin(), seeds.end(), s)) continue;
      if (expanded.count(s)) continue;
      expanded.insert(s);
      found.push_back(s);
    }
  }
  std::sort(found.begin(), found.end());
  return found;
}

}  // namespace detail

// Iterative infection propagation for a single update. Levels grow until no
// further old seed node is identified, or until the max_n cap (heuristic
// mode). Families follow the version rule of the update class: additive
// updates use the new graph, reductive ones the old graph.
inline InfectedRegion tir(FamilyContext& old_ctx, FamilyContext& new_ctx,
                          const UpdateOp& op, const std::vector<NodeId>& seeds,
                          int max_n) {
  UpdateClass kind = classify_update(op);
  FamilyContext& ctx = kind == UpdateClass::Additive ? new_ctx : old_ctx;
  std::vector<NodeId> sorted_seeds(seeds);
  std::sort(sorted_seeds.begin(), sorted_seeds.end());

  InfectedRegion region;
  std::vector<NodeId> level1 = one_ir(old_ctx, new_ctx, op);
  region.levels.push_back(level1);
  region.tir = level1;

  std::unordered_set<NodeId> expanded;
  if (max_n >= 2) {
    std::vector<NodeId> level2;
    if (kind == UpdateClass::Additive) {
      for (NodeId u : level1) {
        detail::merge_into(level2, ctx.family2(u));
        if (std::binary_search(sorted_seeds.begin(), sorted_seeds.end(), u)) {
          expanded.insert(u);
        }
      }
    } else {
      std::vector<NodeId> found =
          detail::seeds_near_level(ctx, level1, sorted_seeds, expanded);
      for (NodeId s : found) detail::merge_into(level2, ctx.family2(s));
    }
    if (!level2.empty()) {
      region.levels.push_back(level2);
      detail::merge_into(region.tir, level2);

      while (static_cast<int>(region.levels.size()) < max_n) {
        std::vector<NodeId> found = detail::seeds_near_level(
            ctx, region.levels.back(), sorted_seeds, expanded);
        if (found.empty()) break;
        std::vector<NodeId> next;
        for (NodeId s : found) detail::merge_into(next, ctx.family2(s));
        region.levels.push_back(next);
        detail::merge_into(region.tir, next);
      }
    }
  }

  region.terminated_at = static_cast<int>(region.levels.size());
  for (NodeId s : sorted_seeds) {
    if (region.contains(s)) region.infected_seeds.push_back(s);
  }
  return region;
}

inline InfectedRegion tir(const UncertainGraph& g_old, const UncertainGraph& g_new,
                          const UpdateOp& op, const std::vector<NodeId>& seeds,
                          Theta theta, int max_n = kUnboundedLevels) {
  FamilyContext old_ctx(g_old, theta), new_ctx(g_new, theta);
  return tir(old_ctx, new_ctx, op, seeds, max_n);
}

// Batch TIR: the union of per-op regions. Family computations are shared
// through the contexts, so a seed's 2-family is expanded at most once per
// graph version.
inline InfectedRegion tir_batch(FamilyContext& old_ctx, FamilyContext& new_ctx,
                                const UpdateBatch& batch,
                                const std::vector<NodeId>& seeds, int max_n) {
  InfectedRegion merged;
  for (const auto& op : batch.ops) {
    InfectedRegion r = tir(old_ctx, new_ctx, op, seeds, max_n);
    if (merged.levels.size() < r.levels.size()) {
      merged.levels.resize(r.levels.size());
    }
    for (std::size_t i = 0; i < r.levels.size(); ++i) {
      detail::merge_into(merged.levels[i], r.levels[i]);
    }
    detail::merge_into(merged.tir, r.tir);
    detail::merge_into(merged.infected_seeds, r.infected_seeds);
    merged.terminated_at = std::max(merged.terminated_at, r.terminated_at);
  }
  return merged;
}

inline InfectedRegion tir_batch(const UncertainGraph& g_old,
                                const UncertainGraph& g_new,
                                const UpdateBatch& batch,
                                const std::vector<NodeId>& seeds, Theta theta,
                                int max_n = kUnboundedLevels) {
  FamilyContext old_ctx(g_old, theta), new_ctx(g_new, theta);
  return tir_batch(old_ctx, new_ctx, batch, seeds, max_n);
}

}  // namespace dynim
