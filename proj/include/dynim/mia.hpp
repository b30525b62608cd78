#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <unordered_map>
#include <vector>

#include "dynim/errors.hpp"
#include "dynim/graph.hpp"

namespace dynim {

// Influence threshold; maximum influence paths with probability below it are
// pruned.
struct Theta {
  double value = 0.1;

  Theta() = default;
  explicit Theta(double v) : value(v) {
    if (!(v > 0.0) || v > 1.0) throw InvalidParam("theta outside (0,1]");
  }
};

enum class Direction { In, Out };

// Union of maximum influence paths to (In) or from (Out) the root, pruned at
// the threshold. Members are stored in Dijkstra settle order, root first, so
// every member appears after its parent.
struct Arborescence {
  struct Member {
    NodeId node;
    NodeId parent;       // next hop toward the root; root points to itself
    double path_prob;    // product of edge probabilities along the path
    double edge_prob;    // probability of the tree edge to the parent
    std::uint32_t parent_pos;
  };

  NodeId root = kNoNode;
  Direction direction = Direction::In;
  std::vector<Member> members;
  std::vector<std::vector<std::uint32_t>> children;  // positions, per member
  std::unordered_map<NodeId, std::uint32_t> pos;

  bool contains(NodeId u) const { return pos.count(u) != 0; }

  double path_prob(NodeId u) const {
    auto it = pos.find(u);
    return it == pos.end() ? 0.0 : members[it->second].path_prob;
  }

  std::vector<NodeId> node_set() const {
    std::vector<NodeId> ids;
    ids.reserve(members.size());
    for (const auto& m : members) ids.push_back(m.node);
    std::sort(ids.begin(), ids.end());
    return ids;
  }
};

namespace detail {

// Dijkstra over w(e) = -ln P(e). Ties are broken deterministically by
// (distance, node id, predecessor id) ordering so repeated runs produce the
// same arborescence.
inline Arborescence dijkstra_tree(const UncertainGraph& g, NodeId root,
                                  double dist_limit, Direction dir) {
  struct QueueEntry {
    double dist;
    NodeId node;
    NodeId pred;
    double edge_prob;
  };
  struct Later {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
      if (a.dist != b.dist) return a.dist > b.dist;
      if (a.node != b.node) return a.node > b.node;
      return a.pred > b.pred;
    }
  };

  Arborescence tree;
  tree.root = root;
  tree.direction = dir;

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, Later> pq;
  pq.push({0.0, root, root, 1.0});
  while (!pq.empty()) {
    QueueEntry e = pq.top();
    pq.pop();
    if (tree.contains(e.node)) continue;

    std::uint32_t position = static_cast<std::uint32_t>(tree.members.size());
    std::uint32_t parent_pos = e.node == root ? position : tree.pos.at(e.pred);
    double parent_prob = e.node == root ? 1.0 : tree.members[parent_pos].path_prob;
    tree.members.push_back({e.node, e.pred, parent_prob * e.edge_prob, e.edge_prob, parent_pos});
    tree.pos.emplace(e.node, position);

    const auto& adj = dir == Direction::In ? g.in_edges(e.node) : g.out_edges(e.node);
    for (const auto& [next, p] : adj) {
      if (tree.contains(next)) continue;
      double nd = e.dist - std::log(p);
      if (nd > dist_limit) continue;
      pq.push({nd, next, e.node, p});
    }
  }

  tree.children.resize(tree.members.size());
  for (std::uint32_t i = 1; i < tree.members.size(); ++i) {
    tree.children[tree.members[i].parent_pos].push_back(i);
  }
  return tree;
}

inline double theta_limit(Theta theta) { return -std::log(theta.value) + 1e-12; }

}  // namespace detail

inline Arborescence miia(const UncertainGraph& g, NodeId u, Theta theta) {
  if (!g.alive(u)) throw MissingTarget("node " + std::to_string(u) + " not present");
  return detail::dijkstra_tree(g, u, detail::theta_limit(theta), Direction::In);
}

inline Arborescence mioa(const UncertainGraph& g, NodeId u, Theta theta) {
  if (!g.alive(u)) throw MissingTarget("node " + std::to_string(u) + " not present");
  return detail::dijkstra_tree(g, u, detail::theta_limit(theta), Direction::Out);
}

// Maximum influence path from u to v: probability and node sequence.
// Returns (0, {}) when v is unreachable.
inline std::pair<double, std::vector<NodeId>> mip_prob(const UncertainGraph& g,
                                                       NodeId u, NodeId v) {
  if (!g.alive(u) || !g.alive(v)) {
    throw MissingTarget("mip endpoint not present");
  }
  Arborescence tree = detail::dijkstra_tree(
      g, u, std::numeric_limits<double>::infinity(), Direction::Out);
  auto it = tree.pos.find(v);
  if (it == tree.pos.end()) return {0.0, {}};
  std::vector<NodeId> path;
  std::uint32_t cur = it->second;
  while (true) {
    path.push_back(tree.members[cur].node);
    if (tree.members[cur].node == u) break;
    cur = tree.members[cur].parent_pos;
  }
  std::reverse(path.begin(), path.end());
  return {tree.members[it->second].path_prob, path};
}

// Influence spread and marginal gain evaluation under the MIA model.
// Arborescences are cached per node; the graph must not change while an
// evaluator is alive (checked against the graph version).
class SpreadEvaluator {
 public:
  SpreadEvaluator(const UncertainGraph& g, Theta theta)
      : g_(g), theta_(theta), version_(g.version()) {}

  const UncertainGraph& graph() const { return g_; }
  Theta theta() const { return theta_; }

  const Arborescence& in_tree(NodeId u) const {
    check_version();
    auto it = miia_cache_.find(u);
    if (it == miia_cache_.end()) {
      it = miia_cache_.emplace(u, miia(g_, u, theta_)).first;
    }
    return it->second;
  }

  const Arborescence& out_tree(NodeId u) const {
    check_version();
    auto it = mioa_cache_.find(u);
    if (it == mioa_cache_.end()) {
      it = mioa_cache_.emplace(u, mioa(g_, u, theta_)).first;
    }
    return it->second;
  }

  // pp(S,u): probability that u is activated by S, evaluated bottom-up on
  // MIIA(u, theta).
  double activation(const std::vector<NodeId>& seeds, NodeId u) const {
    if (std::binary_search(seeds.begin(), seeds.end(), u)) return 1.0;
    return tree_activation(in_tree(u), seeds);
  }

  // sigma(S): only nodes inside some MIOA(s) can be activated, so the sum is
  // restricted to their union.
  double spread(const std::vector<NodeId>& seeds) const {
    std::vector<NodeId> sorted = sorted_copy(seeds);
    std::vector<NodeId> targets = reachable_union(sorted);
    double total = 0.0;
    for (NodeId u : targets) total += activation(sorted, u);
    return total;
  }

  // MG(S,u) = sigma(S + u) - sigma(S); adding u can only change activation
  // inside MIOA(u), so the difference is summed there.
  double marginal_gain(const std::vector<NodeId>& seeds, NodeId u) const {
    std::vector<NodeId> sorted = sorted_copy(seeds);
    if (std::binary_search(sorted.begin(), sorted.end(), u)) {
      throw AlreadySeed("node " + std::to_string(u) + " already a seed");
    }
    std::vector<NodeId> with;
    with.reserve(sorted.size() + 1);
    with = sorted;
    with.insert(std::lower_bound(with.begin(), with.end(), u), u);

    const Arborescence& region = out_tree(u);
    std::vector<NodeId> targets = region.node_set();
    double total = 0.0;
    for (NodeId w : targets) {
      double after = activation(with, w);
      double before = sorted.empty() ? 0.0 : activation(sorted, w);
      total += after - before;
    }
    return total;
  }

  double sigma_single(NodeId u) const { return marginal_gain({}, u); }

 private:
  static std::vector<NodeId> sorted_copy(const std::vector<NodeId>& seeds) {
    std::vector<NodeId> sorted(seeds);
    std::sort(sorted.begin(), sorted.end());
    return sorted;
  }

  std::vector<NodeId> reachable_union(const std::vector<NodeId>& sorted_seeds) const {
    std::vector<NodeId> targets;
    for (NodeId s : sorted_seeds) {
      for (const auto& m : out_tree(s).members) targets.push_back(m.node);
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    return targets;
  }

  double tree_activation(const Arborescence& tree, const std::vector<NodeId>& sorted_seeds) const {
    std::size_t n = tree.members.size();
    ap_.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
      const auto& m = tree.members[i];
      if (std::binary_search(sorted_seeds.begin(), sorted_seeds.end(), m.node)) {
        ap_[i] = 1.0;
        continue;
      }
      double keep_inactive = 1.0;
      for (std::uint32_t c : tree.children[i]) {
        keep_inactive *= 1.0 - ap_[c] * tree.members[c].edge_prob;
      }
      ap_[i] = 1.0 - keep_inactive;
    }
    return ap_.empty() ? 0.0 : ap_[0];
  }

  void check_version() const {
    if (g_.version() != version_) {
      throw Error("graph changed under a live SpreadEvaluator");
    }
  }

  const UncertainGraph& g_;
  Theta theta_;
  std::uint64_t version_;
  mutable std::unordered_map<NodeId, Arborescence> miia_cache_;
  mutable std::unordered_map<NodeId, Arborescence> mioa_cache_;
  mutable std::vector<double> ap_;
};

inline double activation_prob(const UncertainGraph& g, const std::vector<NodeId>& seeds,
                              NodeId u, Theta theta) {
  SpreadEvaluator eval(g, theta);
  std::vector<NodeId> sorted(seeds);
  std::sort(sorted.begin(), sorted.end());
  return eval.activation(sorted, u);
}

inline double spread_mia(const UncertainGraph& g, const std::vector<NodeId>& seeds,
                         Theta theta) {
  return SpreadEvaluator(g, theta).spread(seeds);
}

inline double marginal_gain_mia(const UncertainGraph& g, const std::vector<NodeId>& seeds,
                                NodeId u, Theta theta) {
  return SpreadEvaluator(g, theta).marginal_gain(seeds, u);
}

}  // namespace dynim
