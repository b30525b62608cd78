#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dynim/errors.hpp"
#include "dynim/graph.hpp"

namespace dynim {

struct TemporalRecord {
  std::int64_t u = 0;
  std::int64_t v = 0;
  std::int64_t timestamp = 0;
  double weight = 1.0;
  bool has_weight = false;
};

struct TemporalEdgeList {
  std::vector<TemporalRecord> records;
};

enum class LoadMode { FirstAppearance, All };

// Parses whitespace-separated "u v t" or "u v w t" lines (Koblenz/SNAP
// exports). Lines starting with '%' or '#' are comments; self-loops are
// dropped at ingestion. Records are returned sorted by timestamp; in
// first-appearance mode only the earliest record per (u,v) survives.
inline TemporalEdgeList parse_temporal_edges(std::istream& is, LoadMode mode,
                                             const std::string& name = "<stream>") {
  TemporalEdgeList list;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    char c = line[start];
    if (c == '%' || c == '#') continue;

    std::istringstream fields(line);
    std::vector<std::string> toks;
    std::string tok;
    while (fields >> tok) toks.push_back(tok);
    if (toks.size() != 3 && toks.size() != 4) {
      throw ParseError(name + ":" + std::to_string(line_no) +
                       ": expected 3 or 4 fields, got " + std::to_string(toks.size()));
    }
    TemporalRecord rec;
    try {
      rec.u = std::stoll(toks[0]);
      rec.v = std::stoll(toks[1]);
      if (toks.size() == 4) {
        rec.weight = std::stod(toks[2]);
        rec.has_weight = true;
        rec.timestamp = std::stoll(toks[3]);
      } else {
        rec.timestamp = std::stoll(toks[2]);
      }
    } catch (const std::exception&) {
      throw ParseError(name + ":" + std::to_string(line_no) + ": bad field in '" +
                       line + "'");
    }
    if (rec.u == rec.v) continue;
    list.records.push_back(rec);
  }
  std::stable_sort(list.records.begin(), list.records.end(),
                   [](const TemporalRecord& a, const TemporalRecord& b) {
                     return a.timestamp < b.timestamp;
                   });
  if (mode == LoadMode::FirstAppearance) {
    std::unordered_set<std::uint64_t> seen;
    std::vector<TemporalRecord> kept;
    kept.reserve(list.records.size());
    std::unordered_map<std::int64_t, std::uint32_t> compact;
    auto key_of = [&](std::int64_t raw) {
      auto [it, fresh] = compact.emplace(raw, static_cast<std::uint32_t>(compact.size()));
      return it->second;
    };
    for (const auto& rec : list.records) {
      std::uint64_t key = edge_key(key_of(rec.u), key_of(rec.v));
      if (seen.insert(key).second) kept.push_back(rec);
    }
    list.records = std::move(kept);
  }
  if (list.records.empty()) throw EmptyDataset(name + ": no edges");
  return list;
}

inline TemporalEdgeList load_temporal_edges(const std::string& path, LoadMode mode) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path);
  return parse_temporal_edges(f, mode, path);
}

// Raw dataset ids are remapped to a dense 0..n-1 range in order of first
// appearance; the sidecar map retains the original ids.
class IdRemap {
 public:
  NodeId intern(std::int64_t raw) {
    auto it = to_dense_.find(raw);
    if (it != to_dense_.end()) return it->second;
    NodeId id = static_cast<NodeId>(to_raw_.size());
    to_dense_.emplace(raw, id);
    to_raw_.push_back(raw);
    return id;
  }

  std::optional<NodeId> lookup(std::int64_t raw) const {
    auto it = to_dense_.find(raw);
    if (it == to_dense_.end()) return std::nullopt;
    return it->second;
  }

  std::int64_t raw_id(NodeId id) const { return to_raw_.at(id); }
  std::size_t size() const { return to_raw_.size(); }

 private:
  std::unordered_map<std::int64_t, NodeId> to_dense_;
  std::vector<std::int64_t> to_raw_;
};

struct RemappedEdge {
  NodeId u;
  NodeId v;
  std::int64_t timestamp;
  double weight;
};

struct RemappedDataset {
  std::vector<RemappedEdge> edges;  // timestamp order
  IdRemap ids;
};

inline RemappedDataset remap_dataset(const TemporalEdgeList& list) {
  RemappedDataset ds;
  ds.edges.reserve(list.records.size());
  for (const auto& rec : list.records) {
    RemappedEdge e;
    e.u = ds.ids.intern(rec.u);
    e.v = ds.ids.intern(rec.v);
    e.timestamp = rec.timestamp;
    e.weight = rec.weight;
    ds.edges.push_back(e);
  }
  return ds;
}

}  // namespace dynim
