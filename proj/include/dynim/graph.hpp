#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dynim/errors.hpp"
#include "dynim/rng.hpp"

namespace dynim {

using NodeId = std::uint32_t;
constexpr NodeId kNoNode = static_cast<NodeId>(-1);

// Probabilities live in the open interval (0,1); values that a model would
// push to 1 are clamped so log-space path weights stay finite.
constexpr double kMaxProb = 1.0 - 1e-9;

inline std::uint64_t edge_key(NodeId u, NodeId v) {
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Directed uncertain graph with mirrored adjacency. Node ids are dense and
// never reused within a run; deleted slots stay dead.
class UncertainGraph {
 public:
  using Adjacency = std::vector<std::pair<NodeId, double>>;

  UncertainGraph() = default;
  explicit UncertainGraph(std::size_t n) { add_nodes(n); }

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edge_count_; }
  // Number of id slots ever allocated, including dead ones.
  std::size_t slot_count() const { return alive_.size(); }
  std::uint64_t version() const { return version_; }

  bool alive(NodeId u) const { return u < alive_.size() && alive_[u]; }

  NodeId add_node() {
    NodeId id = static_cast<NodeId>(alive_.size());
    add_node(id);
    return id;
  }

  void add_node(NodeId id) {
    if (id < alive_.size()) {
      throw DuplicateTarget("node id " + std::to_string(id) +
                            (alive_[id] ? " already present" : " was deleted and cannot be reused"));
    }
    alive_.resize(id + 1, 0);
    out_.resize(id + 1);
    in_.resize(id + 1);
    alive_[id] = 1;
    ++node_count_;
    ++version_;
  }

  void add_nodes(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) add_node();
  }

  void remove_node(NodeId u) {
    require_alive(u);
    for (auto& [v, p] : out_[u]) {
      erase_entry(in_[v], u);
      --edge_count_;
    }
    for (auto& [w, p] : in_[u]) {
      erase_entry(out_[w], u);
      --edge_count_;
    }
    out_[u].clear();
    in_[u].clear();
    alive_[u] = 0;
    --node_count_;
    ++version_;
  }

  void add_edge(NodeId u, NodeId v, double p) {
    require_alive(u);
    require_alive(v);
    if (u == v) throw InvalidParam("self-loop " + std::to_string(u));
    check_probability(p);
    if (find_entry(out_[u], v)) {
      throw DuplicateTarget("edge " + edge_name(u, v) + " already present");
    }
    insert_entry(out_[u], v, p);
    insert_entry(in_[v], u, p);
    ++edge_count_;
    ++version_;
  }

  void remove_edge(NodeId u, NodeId v) {
    require_alive(u);
    require_alive(v);
    if (!find_entry(out_[u], v)) {
      throw MissingTarget("edge " + edge_name(u, v) + " not present");
    }
    erase_entry(out_[u], v);
    erase_entry(in_[v], u);
    --edge_count_;
    ++version_;
  }

  void set_probability(NodeId u, NodeId v, double p) {
    require_alive(u);
    require_alive(v);
    check_probability(p);
    auto* fwd = find_entry(out_[u], v);
    if (!fwd) throw MissingTarget("edge " + edge_name(u, v) + " not present");
    fwd->second = p;
    find_entry(in_[v], u)->second = p;
    ++version_;
  }

  bool has_edge(NodeId u, NodeId v) const {
    return u < out_.size() && find_entry(out_[u], v) != nullptr;
  }

  std::optional<double> probability(NodeId u, NodeId v) const {
    if (u >= out_.size()) return std::nullopt;
    const auto* e = find_entry(out_[u], v);
    if (!e) return std::nullopt;
    return e->second;
  }

  const Adjacency& out_edges(NodeId u) const { return out_[u]; }
  const Adjacency& in_edges(NodeId u) const { return in_[u]; }
  std::size_t out_degree(NodeId u) const { return out_[u].size(); }
  std::size_t in_degree(NodeId u) const { return in_[u].size(); }

  std::vector<NodeId> nodes() const {
    std::vector<NodeId> ids;
    ids.reserve(node_count_);
    for (NodeId u = 0; u < alive_.size(); ++u) {
      if (alive_[u]) ids.push_back(u);
    }
    return ids;
  }

  // Verifies that in_ is the exact transpose of out_ and counts agree.
  void audit_mirrors() const {
    std::size_t edges = 0, nodes = 0;
    for (NodeId u = 0; u < alive_.size(); ++u) {
      if (alive_[u]) ++nodes;
      if (!alive_[u] && (!out_[u].empty() || !in_[u].empty())) {
        throw Error("dead node " + std::to_string(u) + " has adjacency");
      }
      for (const auto& [v, p] : out_[u]) {
        ++edges;
        const auto* back = find_entry(in_[v], u);
        if (!back || back->second != p) {
          throw Error("mirror mismatch on edge " + edge_name(u, v));
        }
      }
    }
    std::size_t back_edges = 0;
    for (NodeId v = 0; v < alive_.size(); ++v) back_edges += in_[v].size();
    if (edges != edge_count_ || back_edges != edge_count_ || nodes != node_count_) {
      throw Error("adjacency counts out of sync");
    }
  }

 private:
  static std::string edge_name(NodeId u, NodeId v) {
    return std::to_string(u) + "->" + std::to_string(v);
  }

  static void check_probability(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
      throw InvalidProbability("probability " + std::to_string(p) +
                               " outside (0,1)");
    }
  }

  void require_alive(NodeId u) const {
    if (!alive(u)) throw MissingTarget("node " + std::to_string(u) + " not present");
  }

  static std::pair<NodeId, double>* find_entry(Adjacency& adj, NodeId id) {
    auto it = std::lower_bound(adj.begin(), adj.end(), id,
                               [](const auto& e, NodeId x) { return e.first < x; });
    return (it != adj.end() && it->first == id) ? &*it : nullptr;
  }

  static const std::pair<NodeId, double>* find_entry(const Adjacency& adj, NodeId id) {
    auto it = std::lower_bound(adj.begin(), adj.end(), id,
                               [](const auto& e, NodeId x) { return e.first < x; });
    return (it != adj.end() && it->first == id) ? &*it : nullptr;
  }

  static void insert_entry(Adjacency& adj, NodeId id, double p) {
    auto it = std::lower_bound(adj.begin(), adj.end(), id,
                               [](const auto& e, NodeId x) { return e.first < x; });
    adj.insert(it, {id, p});
  }

  static void erase_entry(Adjacency& adj, NodeId id) {
    auto it = std::lower_bound(adj.begin(), adj.end(), id,
                               [](const auto& e, NodeId x) { return e.first < x; });
    adj.erase(it);
  }

  std::vector<Adjacency> out_, in_;
  std::vector<std::uint8_t> alive_;
  std::size_t node_count_ = 0;
  std::size_t edge_count_ = 0;
  std::uint64_t version_ = 0;
};

enum class UpdateKind {
  EdgeProbIncrease,
  EdgeAdd,
  NodeAdd,
  EdgeProbDecrease,
  EdgeDelete,
  NodeDelete,
};

enum class UpdateClass { Additive, Reductive };

struct UpdateOp {
  UpdateKind kind;
  NodeId u = kNoNode;
  NodeId v = kNoNode;
  double p = 0.0;

  // The node at which the update originates; edge ops originate at the
  // source, node ops at the node itself.
  NodeId origin() const { return u; }

  static UpdateOp edge_add(NodeId u, NodeId v, double p) {
    return {UpdateKind::EdgeAdd, u, v, p};
  }
  static UpdateOp edge_delete(NodeId u, NodeId v) {
    return {UpdateKind::EdgeDelete, u, v, 0.0};
  }
  static UpdateOp prob_increase(NodeId u, NodeId v, double p) {
    return {UpdateKind::EdgeProbIncrease, u, v, p};
  }
  static UpdateOp prob_decrease(NodeId u, NodeId v, double p) {
    return {UpdateKind::EdgeProbDecrease, u, v, p};
  }
  static UpdateOp node_add(NodeId u) { return {UpdateKind::NodeAdd, u, kNoNode, 0.0}; }
  static UpdateOp node_delete(NodeId u) { return {UpdateKind::NodeDelete, u, kNoNode, 0.0}; }

  bool is_edge_op() const {
    return kind != UpdateKind::NodeAdd && kind != UpdateKind::NodeDelete;
  }
};

inline UpdateClass classify_update(const UpdateOp& op) {
  switch (op.kind) {
    case UpdateKind::EdgeProbIncrease:
    case UpdateKind::EdgeAdd:
    case UpdateKind::NodeAdd:
      return UpdateClass::Additive;
    default:
      return UpdateClass::Reductive;
  }
}

struct UpdateBatch {
  std::vector<UpdateOp> ops;
  bool coalesced = false;
};

inline void apply_update(UncertainGraph& g, const UpdateOp& op) {
  switch (op.kind) {
    case UpdateKind::EdgeAdd:
      g.add_edge(op.u, op.v, op.p);
      break;
    case UpdateKind::EdgeDelete:
      g.remove_edge(op.u, op.v);
      break;
    case UpdateKind::EdgeProbIncrease:
    case UpdateKind::EdgeProbDecrease:
      g.set_probability(op.u, op.v, op.p);
      break;
    case UpdateKind::NodeAdd:
      g.add_node(op.u);
      break;
    case UpdateKind::NodeDelete:
      g.remove_node(op.u);
      break;
  }
}

inline void apply_batch(UncertainGraph& g, const UpdateBatch& batch) {
  for (const auto& op : batch.ops) apply_update(g, op);
}

// Reduces an op sequence to its net effect against `base`: an edge added and
// deleted in the same batch disappears, repeated probability changes collapse
// to the final value, and edge ops on nodes that are deleted by the batch are
// subsumed by the node deletion. Without `base` the pre-batch state is
// inferred from the first op on each key (sufficient for everything except
// classifying a delete-then-re-add, which degrades to EdgeAdd semantics).
inline UpdateBatch coalesce_batch(const std::vector<UpdateOp>& ops,
                                  const UncertainGraph* base = nullptr) {
  struct EdgeState {
    std::size_t first_pos;
    bool existed_before;
    bool exists_now;
    double prob_before;  // NaN when unknown
    double prob_now;
    UpdateKind last_kind;
  };
  struct NodeState {
    std::size_t first_pos;
    bool existed_before;
    bool exists_now;
  };

  std::unordered_map<std::uint64_t, EdgeState> edges;
  std::unordered_map<NodeId, NodeState> node_ops;

  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto& op = ops[i];
    if (!op.is_edge_op()) {
      auto it = node_ops.find(op.u);
      if (it == node_ops.end()) {
        bool before = base ? base->alive(op.u) : op.kind != UpdateKind::NodeAdd;
        it = node_ops.emplace(op.u, NodeState{i, before, before}).first;
      }
      it->second.exists_now = op.kind == UpdateKind::NodeAdd;
      continue;
    }
    auto key = edge_key(op.u, op.v);
    auto it = edges.find(key);
    if (it == edges.end()) {
      bool before;
      double p_before = std::nan("");
      if (base) {
        auto p = base->probability(op.u, op.v);
        before = p.has_value();
        if (p) p_before = *p;
      } else {
        before = op.kind != UpdateKind::EdgeAdd;
      }
      it = edges.emplace(key, EdgeState{i, before, before, p_before, p_before, op.kind}).first;
    }
    auto& st = it->second;
    switch (op.kind) {
      case UpdateKind::EdgeAdd:
        st.exists_now = true;
        st.prob_now = op.p;
        break;
      case UpdateKind::EdgeDelete:
        st.exists_now = false;
        break;
      default:
        st.exists_now = true;
        st.prob_now = op.p;
        break;
    }
    st.last_kind = op.kind;
  }

  // Nodes deleted by the batch subsume their incident edge ops.
  auto endpoint_gone = [&](NodeId x) {
    auto it = node_ops.find(x);
    return it != node_ops.end() && !it->second.exists_now;
  };

  std::vector<std::pair<std::size_t, UpdateOp>> net;
  for (auto& [u, st] : node_ops) {
    if (!st.existed_before && st.exists_now) {
      net.emplace_back(st.first_pos, UpdateOp::node_add(u));
    } else if (st.existed_before && !st.exists_now) {
      net.emplace_back(st.first_pos, UpdateOp::node_delete(u));
    }
  }
  for (auto& [key, st] : edges) {
    NodeId u = static_cast<NodeId>(key >> 32);
    NodeId v = static_cast<NodeId>(key & 0xffffffffULL);
    if (endpoint_gone(u) || endpoint_gone(v)) continue;
    if (!st.existed_before && st.exists_now) {
      net.emplace_back(st.first_pos, UpdateOp::edge_add(u, v, st.prob_now));
    } else if (st.existed_before && !st.exists_now) {
      net.emplace_back(st.first_pos, UpdateOp::edge_delete(u, v));
    } else if (st.existed_before && st.exists_now) {
      if (!std::isnan(st.prob_before)) {
        if (st.prob_now == st.prob_before) continue;
        net.emplace_back(st.first_pos,
                         st.prob_now > st.prob_before
                             ? UpdateOp::prob_increase(u, v, st.prob_now)
                             : UpdateOp::prob_decrease(u, v, st.prob_now));
      } else if (st.last_kind == UpdateKind::EdgeProbDecrease) {
        net.emplace_back(st.first_pos, UpdateOp::prob_decrease(u, v, st.prob_now));
      } else {
        net.emplace_back(st.first_pos, UpdateOp::prob_increase(u, v, st.prob_now));
      }
    }
  }

  std::sort(net.begin(), net.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  UpdateBatch batch;
  batch.coalesced = true;
  batch.ops.reserve(net.size());
  for (auto& [pos, op] : net) batch.ops.push_back(op);
  return batch;
}

inline double dwa_probability(std::size_t in_degree) {
  if (in_degree <= 1) return kMaxProb;
  return 1.0 / static_cast<double>(in_degree);
}

// Degree weighted activation: every edge (u,v) carries 1/d_in(v).
inline void assign_dwa(UncertainGraph& g) {
  for (NodeId v : g.nodes()) {
    double p = dwa_probability(g.in_degree(v));
    // Copy: set_probability mutates the adjacency we would iterate.
    auto in_edges = g.in_edges(v);
    for (const auto& [w, old_p] : in_edges) {
      if (old_p != p) g.set_probability(w, v, p);
    }
  }
}

// Expands one structural update into the batch of probability adjustments the
// DWA model implies for every node whose in-degree changes.
inline UpdateBatch dwa_induced_updates(const UncertainGraph& g, const UpdateOp& op) {
  UpdateBatch batch;
  batch.coalesced = true;
  switch (op.kind) {
    case UpdateKind::EdgeAdd: {
      std::size_t d_new = g.in_degree(op.v) + 1;
      double p = dwa_probability(d_new);
      batch.ops.push_back(UpdateOp::edge_add(op.u, op.v, p));
      for (const auto& [w, old_p] : g.in_edges(op.v)) {
        batch.ops.push_back(UpdateOp::prob_decrease(w, op.v, p));
      }
      break;
    }
    case UpdateKind::EdgeDelete: {
      batch.ops.push_back(op);
      std::size_t d_new = g.in_degree(op.v) - 1;
      if (d_new > 0) {
        double p = dwa_probability(d_new);
        for (const auto& [w, old_p] : g.in_edges(op.v)) {
          if (w == op.u) continue;
          batch.ops.push_back(UpdateOp::prob_increase(w, op.v, p));
        }
      }
      break;
    }
    case UpdateKind::NodeDelete: {
      batch.ops.push_back(op);
      for (const auto& [x, old_p] : g.out_edges(op.u)) {
        std::size_t d_new = g.in_degree(x) - 1;
        if (d_new == 0) continue;
        double p = dwa_probability(d_new);
        for (const auto& [w, q] : g.in_edges(x)) {
          if (w == op.u) continue;
          batch.ops.push_back(UpdateOp::prob_increase(w, x, p));
        }
      }
      break;
    }
    default:
      batch.ops.push_back(op);
      break;
  }
  return batch;
}

// Expands a sequence of structural ops into the full DWA batch, applying
// each induced op against an evolving scratch copy of `g`.
inline std::vector<UpdateOp> dwa_expand_batch(const UncertainGraph& g,
                                              const std::vector<UpdateOp>& ops) {
  UncertainGraph scratch = g;
  std::vector<UpdateOp> expanded;
  for (const auto& op : ops) {
    UpdateBatch induced = dwa_induced_updates(scratch, op);
    for (const auto& e : induced.ops) {
      expanded.push_back(e);
      apply_update(scratch, e);
    }
  }
  return expanded;
}

// Trivalency model draw, stable for an edge across its whole lifetime.
inline double tv_probability(std::uint64_t seed, NodeId u, NodeId v) {
  static constexpr double kLevels[3] = {0.1, 0.01, 0.001};
  std::uint64_t h = mix(seed, rng_purpose::tv_assign, edge_key(u, v));
  return kLevels[h % 3];
}

inline void assign_tv(UncertainGraph& g, std::uint64_t seed) {
  for (NodeId u : g.nodes()) {
    auto out = g.out_edges(u);
    for (const auto& [v, p] : out) {
      double q = tv_probability(seed, u, v);
      if (q != p) g.set_probability(u, v, q);
    }
  }
}

// Sliding-window probability from an in-window occurrence count.
inline double window_probability(double f, double k) {
  if (f < 1.0) throw InvalidParam("occurrence count below 1");
  if (!(k > 0.0)) throw InvalidParam("window constant must be positive");
  return 1.0 - std::exp(-f / k);
}

// Snapshot as sorted "u v p" lines, used for test goldens.
inline std::string export_snapshot(const UncertainGraph& g) {
  std::ostringstream os;
  os.precision(17);
  for (NodeId u : g.nodes()) {
    for (const auto& [v, p] : g.out_edges(u)) {
      os << u << ' ' << v << ' ' << p << '\n';
    }
  }
  return os.str();
}

}  // namespace dynim
