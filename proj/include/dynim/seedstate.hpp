#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "dynim/graph.hpp"

namespace dynim {

struct SeedEntry {
  NodeId node;
  double gain;
};

// Deterministic preference between candidates: higher gain wins, node id
// breaks ties.
inline bool better_candidate(double gain_a, NodeId a, double gain_b, NodeId b) {
  if (gain_a != gain_b) return gain_a > gain_b;
  return a < b;
}

// Max-priority queue over non-seed nodes keyed by cached marginal gain.
// Entries carry a staleness flag: a value is fresh only if it was evaluated
// against the current basis seed set. Stale entries are upper bounds (lazy
// forward evaluation), so pop_best re-evaluates until the top is fresh.
class LazyQueue {
 public:
  void upsert(NodeId node, double gain, bool fresh) {
    std::uint64_t serial = ++next_serial_;
    values_[node] = {gain, serial, fresh ? basis_ : 0};
    heap_.push({gain, node, serial});
  }

  void erase(NodeId node) { values_.erase(node); }

  bool contains(NodeId node) const { return values_.count(node) != 0; }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  std::optional<double> cached_gain(NodeId node) const {
    auto it = values_.find(node);
    if (it == values_.end()) return std::nullopt;
    return it->second.gain;
  }

  bool is_fresh(NodeId node) const {
    auto it = values_.find(node);
    return it != values_.end() && it->second.basis == basis_;
  }

  // The basis seed set changed: every cached value becomes stale.
  void invalidate_all() { ++basis_; }

  // Returns the entry with the maximum true gain, re-evaluating stale tops
  // with `reeval` until a fresh entry surfaces. The entry stays in the queue.
  std::optional<SeedEntry> pop_best(const std::function<double(NodeId)>& reeval) {
    while (!heap_.empty()) {
      HeapEntry top = heap_.top();
      auto it = values_.find(top.node);
      if (it == values_.end() || it->second.serial != top.serial) {
        heap_.pop();
        continue;
      }
      if (it->second.basis == basis_) return SeedEntry{top.node, top.gain};
      heap_.pop();
      upsert(top.node, reeval(top.node), true);
    }
    return std::nullopt;
  }

  std::vector<SeedEntry> entries() const {
    std::vector<SeedEntry> out;
    out.reserve(values_.size());
    for (const auto& [node, v] : values_) out.push_back({node, v.gain});
    std::sort(out.begin(), out.end(),
              [](const SeedEntry& a, const SeedEntry& b) { return a.node < b.node; });
    return out;
  }

 private:
  struct HeapEntry {
    double gain;
    NodeId node;
    std::uint64_t serial;
  };
  struct Worse {
    bool operator()(const HeapEntry& a, const HeapEntry& b) const {
      return !better_candidate(a.gain, a.node, b.gain, b.node);
    }
  };
  struct Value {
    double gain;
    std::uint64_t serial;
    std::uint64_t basis;
  };

  std::priority_queue<HeapEntry, std::vector<HeapEntry>, Worse> heap_;
  std::unordered_map<NodeId, Value> values_;
  std::uint64_t next_serial_ = 0;
  std::uint64_t basis_ = 1;
};

// Ordered seed set (greedy inclusion order, with the marginal gain recorded
// at inclusion) plus the priority queue over the remaining candidates.
struct SeedState {
  std::vector<SeedEntry> ordered;
  LazyQueue queue;

  bool is_seed(NodeId u) const {
    for (const auto& e : ordered) {
      if (e.node == u) return true;
    }
    return false;
  }

  std::vector<NodeId> seeds_in_order() const {
    std::vector<NodeId> ids;
    ids.reserve(ordered.size());
    for (const auto& e : ordered) ids.push_back(e.node);
    return ids;
  }

  std::vector<NodeId> seed_set() const {
    std::vector<NodeId> ids = seeds_in_order();
    std::sort(ids.begin(), ids.end());
    return ids;
  }
};

}  // namespace dynim
