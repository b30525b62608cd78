#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "dynim/dynamic.hpp"
#include "dynim/errors.hpp"
#include "dynim/graph.hpp"
#include "dynim/greedy.hpp"
#include "dynim/ic.hpp"
#include "dynim/mia.hpp"
#include "dynim/rng.hpp"
#include "dynim/sketch.hpp"
#include "dynim/temporal.hpp"

namespace dynim {

enum class ProbabilityModel { Dwa, Tv, Window };
enum class Diffusion { Mia, Ic };
enum class Algorithm { NFamilyMia, FCelf, FRrs, StaticGreedy, StaticCelf, StaticRrs };
enum class ScenarioKind { EdgeAdd, EdgeDel, NodeAdd, NodeDel, Window };
enum class MetricsFormat { Csv, Json };

struct ScenarioConfig {
  std::string dataset;
  ProbabilityModel model = ProbabilityModel::Dwa;
  Diffusion diffusion = Diffusion::Ic;
  Algorithm algorithm = Algorithm::FCelf;
  std::size_t k = 30;
  double theta = 0.1;
  double beta = 32.0;
  std::size_t mc_count = 10000;
  std::size_t mc_eval = 0;  // estimator worlds for IC gains; 0 = mc_count
  int max_n = 2;
  ScenarioKind scenario = ScenarioKind::EdgeAdd;
  double split = 0.4;
  std::int64_t window_w = 3600;
  std::int64_t window_l = 60;
  double kappa = 5.0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::size_t max_updates = 0;  // 0 = no cap
  bool timing = true;

  std::size_t eval_worlds() const { return mc_eval ? mc_eval : mc_count; }
};

struct MetricsRecord {
  std::size_t update_index = 0;
  double adjust_seconds = 0.0;
  double spread = 0.0;
  double spread_initial = 0.0;
  std::optional<double> spread_exact_mia;
  std::size_t loop_iterations = 0;
  std::size_t tir_size = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t live_sketches = 0;
  std::size_t retired_sketches = 0;
  std::size_t sketch_weight = 0;
  std::size_t queue_entries = 0;
};

namespace cfgdetail {

inline std::string to_string(ProbabilityModel m) {
  switch (m) {
    case ProbabilityModel::Dwa: return "dwa";
    case ProbabilityModel::Tv: return "tv";
    default: return "window";
  }
}
inline std::string to_string(Diffusion d) {
  return d == Diffusion::Mia ? "mia" : "ic";
}
inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::NFamilyMia: return "nfamily-mia";
    case Algorithm::FCelf: return "fcelf";
    case Algorithm::FRrs: return "frrs";
    case Algorithm::StaticGreedy: return "static-greedy";
    case Algorithm::StaticCelf: return "static-celf";
    default: return "static-rrs";
  }
}
inline std::string to_string(ScenarioKind s) {
  switch (s) {
    case ScenarioKind::EdgeAdd: return "edge-add";
    case ScenarioKind::EdgeDel: return "edge-del";
    case ScenarioKind::NodeAdd: return "node-add";
    case ScenarioKind::NodeDel: return "node-del";
    default: return "window";
  }
}

template <typename T>
T parse_enum(const std::string& value, const std::vector<std::pair<std::string, T>>& table,
             const std::string& key) {
  for (const auto& [name, v] : table) {
    if (name == value) return v;
  }
  throw ConfigError("bad value '" + value + "' for " + key);
}

}  // namespace cfgdetail

inline void set_config_field(ScenarioConfig& cfg, const std::string& key,
                             const std::string& value) {
  using cfgdetail::parse_enum;
  try {
    if (key == "dataset") {
      cfg.dataset = value;
    } else if (key == "model") {
      cfg.model = parse_enum<ProbabilityModel>(
          value,
          {{"dwa", ProbabilityModel::Dwa}, {"tv", ProbabilityModel::Tv},
           {"window", ProbabilityModel::Window}},
          key);
    } else if (key == "diffusion") {
      cfg.diffusion = parse_enum<Diffusion>(
          value, {{"mia", Diffusion::Mia}, {"ic", Diffusion::Ic}}, key);
    } else if (key == "algorithm") {
      cfg.algorithm = parse_enum<Algorithm>(
          value,
          {{"nfamily-mia", Algorithm::NFamilyMia}, {"fcelf", Algorithm::FCelf},
           {"frrs", Algorithm::FRrs}, {"static-greedy", Algorithm::StaticGreedy},
           {"static-celf", Algorithm::StaticCelf}, {"static-rrs", Algorithm::StaticRrs}},
          key);
    } else if (key == "scenario") {
      cfg.scenario = parse_enum<ScenarioKind>(
          value,
          {{"edge-add", ScenarioKind::EdgeAdd}, {"edge-del", ScenarioKind::EdgeDel},
           {"node-add", ScenarioKind::NodeAdd}, {"node-del", ScenarioKind::NodeDel},
           {"window", ScenarioKind::Window}},
          key);
    } else if (key == "k") {
      cfg.k = std::stoull(value);
    } else if (key == "theta") {
      cfg.theta = std::stod(value);
    } else if (key == "beta") {
      cfg.beta = std::stod(value);
    } else if (key == "mc_count") {
      cfg.mc_count = std::stoull(value);
    } else if (key == "mc_eval") {
      cfg.mc_eval = std::stoull(value);
    } else if (key == "max_n") {
      cfg.max_n = value == "unbounded" ? kUnboundedLevels : std::stoi(value);
    } else if (key == "split") {
      cfg.split = std::stod(value);
    } else if (key == "window_w") {
      cfg.window_w = std::stoll(value);
    } else if (key == "window_l") {
      cfg.window_l = std::stoll(value);
    } else if (key == "kappa") {
      cfg.kappa = std::stod(value);
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
    } else if (key == "threads") {
      cfg.threads = static_cast<unsigned>(std::stoul(value));
    } else if (key == "max_updates") {
      cfg.max_updates = std::stoull(value);
    } else if (key == "timing") {
      if (value != "on" && value != "off") throw ConfigError("timing must be on|off");
      cfg.timing = value == "on";
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("bad value '" + value + "' for " + key);
  }
}

inline ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path);
  ScenarioConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t\r");
      std::size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    set_config_field(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

inline void validate_config(const ScenarioConfig& cfg) {
  if (cfg.k == 0) throw ConfigError("k must be positive");
  if (!(cfg.theta > 0.0) || cfg.theta > 1.0) throw ConfigError("theta outside (0,1]");
  if (cfg.beta < 1.0) throw ConfigError("beta must be >= 1");
  if (cfg.mc_count == 0) throw ConfigError("mc_count must be positive");
  if (cfg.max_n < 1) throw ConfigError("max_n must be >= 1 or unbounded");
  if (!(cfg.split > 0.0) || cfg.split >= 1.0) throw ConfigError("split outside (0,1)");
  if (cfg.kappa <= 0.0) throw ConfigError("kappa must be positive");
  if (cfg.window_w <= 0 || cfg.window_l <= 0) throw ConfigError("window sizes must be positive");
  bool mia = cfg.diffusion == Diffusion::Mia;
  switch (cfg.algorithm) {
    case Algorithm::NFamilyMia:
      if (!mia) throw ConfigError("nfamily-mia requires diffusion=mia");
      break;
    case Algorithm::FCelf:
    case Algorithm::FRrs:
    case Algorithm::StaticRrs:
      if (mia) throw ConfigError(cfgdetail::to_string(cfg.algorithm) +
                                 " requires diffusion=ic");
      break;
    default:
      break;
  }
  if (cfg.scenario == ScenarioKind::Window && cfg.model != ProbabilityModel::Window) {
    throw ConfigError("window scenario requires model=window");
  }
  if (cfg.model == ProbabilityModel::Window && cfg.scenario != ScenarioKind::Window) {
    throw ConfigError("model=window requires scenario=window");
  }
}

// ---------------------------------------------------------------------------
// Metrics emission

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline const char* kMetricsHeader =
    "update,adjust_seconds,spread,spread_initial,spread_exact_mia,"
    "loop_iterations,tir_size,nodes,edges,live_sketches,retired_sketches,"
    "sketch_weight,queue_entries";

inline std::string metrics_to_csv(const std::vector<MetricsRecord>& records) {
  std::ostringstream os;
  os << kMetricsHeader << '\n';
  for (const auto& r : records) {
    os << r.update_index << ',' << format_double(r.adjust_seconds) << ','
       << format_double(r.spread) << ',' << format_double(r.spread_initial) << ','
       << (r.spread_exact_mia ? format_double(*r.spread_exact_mia) : std::string())
       << ',' << r.loop_iterations << ',' << r.tir_size << ',' << r.nodes << ','
       << r.edges << ',' << r.live_sketches << ',' << r.retired_sketches << ','
       << r.sketch_weight << ',' << r.queue_entries << '\n';
  }
  return os.str();
}

inline std::string metrics_to_json(const std::vector<MetricsRecord>& records) {
  std::ostringstream os;
  for (const auto& r : records) {
    os << "{\"update\":" << r.update_index
       << ",\"adjust_seconds\":" << format_double(r.adjust_seconds)
       << ",\"spread\":" << format_double(r.spread)
       << ",\"spread_initial\":" << format_double(r.spread_initial)
       << ",\"spread_exact_mia\":"
       << (r.spread_exact_mia ? format_double(*r.spread_exact_mia) : "null")
       << ",\"loop_iterations\":" << r.loop_iterations
       << ",\"tir_size\":" << r.tir_size << ",\"nodes\":" << r.nodes
       << ",\"edges\":" << r.edges << ",\"live_sketches\":" << r.live_sketches
       << ",\"retired_sketches\":" << r.retired_sketches
       << ",\"sketch_weight\":" << r.sketch_weight
       << ",\"queue_entries\":" << r.queue_entries << "}\n";
  }
  return os.str();
}

inline void emit_metrics(const std::vector<MetricsRecord>& records,
                         MetricsFormat format, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path);
  f << (format == MetricsFormat::Csv ? metrics_to_csv(records)
                                     : metrics_to_json(records));
  if (!f) throw DataError("write failed for " + path);
}

inline std::vector<MetricsRecord> parse_metrics_csv(std::istream& is) {
  std::vector<MetricsRecord> records;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line != kMetricsHeader) throw ParseError("unexpected metrics header");
      continue;
    }
    std::vector<std::string> cols;
    std::string col;
    std::istringstream ls(line);
    while (std::getline(ls, col, ',')) cols.push_back(col);
    while (cols.size() < 13) cols.push_back("");
    MetricsRecord r;
    r.update_index = std::stoull(cols[0]);
    r.adjust_seconds = std::stod(cols[1]);
    r.spread = std::stod(cols[2]);
    r.spread_initial = std::stod(cols[3]);
    if (!cols[4].empty()) r.spread_exact_mia = std::stod(cols[4]);
    r.loop_iterations = std::stoull(cols[5]);
    r.tir_size = std::stoull(cols[6]);
    r.nodes = std::stoull(cols[7]);
    r.edges = std::stoull(cols[8]);
    r.live_sketches = std::stoull(cols[9]);
    r.retired_sketches = std::stoull(cols[10]);
    r.sketch_weight = std::stoull(cols[11]);
    r.queue_entries = std::stoull(cols[12]);
    records.push_back(r);
  }
  return records;
}

// ---------------------------------------------------------------------------
// Scenario preparation

struct PreparedScenario {
  UncertainGraph initial;
  std::vector<std::vector<UpdateOp>> batches;  // one entry per replayed update
};

namespace detail {

inline double scenario_edge_probability(const ScenarioConfig& cfg, NodeId u, NodeId v) {
  // DWA probabilities are assigned structurally; the placeholder is replaced
  // by dwa_expand_batch / assign_dwa.
  if (cfg.model == ProbabilityModel::Tv) return tv_probability(cfg.seed, u, v);
  return 0.5;
}

}  // namespace detail

// Builds the initial snapshot and the replayed update stream for the edge and
// node scenarios. Edge scenarios split the timestamp-ordered edge list; node
// scenarios split the first-appearance node order, a joining node arrives as
// one batch with all its edges to already-present nodes.
inline PreparedScenario prepare_scenario(const ScenarioConfig& cfg,
                                         const RemappedDataset& ds) {
  if (cfg.scenario == ScenarioKind::Window) {
    throw ConfigError("window scenario uses run_window");
  }
  PreparedScenario out;
  const auto& edges = ds.edges;
  if (edges.empty()) throw DataError("dataset has no edges");

  std::size_t n_nodes = ds.ids.size();
  auto edge_prob = [&](NodeId u, NodeId v) {
    return detail::scenario_edge_probability(cfg, u, v);
  };

  switch (cfg.scenario) {
    case ScenarioKind::EdgeAdd: {
      std::size_t head = static_cast<std::size_t>(cfg.split * edges.size());
      if (head == 0 || head >= edges.size()) throw DataError("split leaves no updates");
      out.initial.add_nodes(n_nodes);
      for (std::size_t i = 0; i < head; ++i) {
        out.initial.add_edge(edges[i].u, edges[i].v, edge_prob(edges[i].u, edges[i].v));
      }
      for (std::size_t i = head; i < edges.size(); ++i) {
        out.batches.push_back(
            {UpdateOp::edge_add(edges[i].u, edges[i].v, edge_prob(edges[i].u, edges[i].v))});
      }
      break;
    }
    case ScenarioKind::EdgeDel: {
      std::size_t keep = static_cast<std::size_t>(cfg.split * edges.size());
      if (keep == 0 || keep >= edges.size()) throw DataError("split leaves no updates");
      out.initial.add_nodes(n_nodes);
      for (const auto& e : edges) {
        out.initial.add_edge(e.u, e.v, edge_prob(e.u, e.v));
      }
      for (std::size_t i = edges.size(); i-- > keep;) {
        out.batches.push_back({UpdateOp::edge_delete(edges[i].u, edges[i].v)});
      }
      break;
    }
    case ScenarioKind::NodeAdd: {
      std::size_t head = static_cast<std::size_t>(cfg.split * n_nodes);
      if (head == 0 || head >= n_nodes) throw DataError("split leaves no updates");
      out.initial.add_nodes(head);
      for (const auto& e : edges) {
        if (e.u < head && e.v < head) {
          out.initial.add_edge(e.u, e.v, edge_prob(e.u, e.v));
        }
      }
      // Edges sorted by the later endpoint's arrival.
      for (NodeId joining = static_cast<NodeId>(head); joining < n_nodes; ++joining) {
        std::vector<UpdateOp> batch{UpdateOp::node_add(joining)};
        for (const auto& e : edges) {
          NodeId later = std::max(e.u, e.v);
          if (later != joining) continue;
          batch.push_back(UpdateOp::edge_add(e.u, e.v, edge_prob(e.u, e.v)));
        }
        out.batches.push_back(std::move(batch));
      }
      break;
    }
    case ScenarioKind::NodeDel: {
      std::size_t keep = static_cast<std::size_t>(cfg.split * n_nodes);
      if (keep == 0 || keep >= n_nodes) throw DataError("split leaves no updates");
      out.initial.add_nodes(n_nodes);
      for (const auto& e : edges) {
        out.initial.add_edge(e.u, e.v, edge_prob(e.u, e.v));
      }
      for (NodeId doomed = static_cast<NodeId>(n_nodes); doomed-- > keep;) {
        out.batches.push_back({UpdateOp::node_delete(doomed)});
      }
      break;
    }
    default:
      break;
  }

  if (cfg.model == ProbabilityModel::Dwa) assign_dwa(out.initial);
  if (cfg.max_updates && out.batches.size() > cfg.max_updates) {
    out.batches.resize(cfg.max_updates);
  }
  return out;
}

// Builds the slide batches for the sliding-window scenario: per slide of L,
// edges leaving the window are deleted, edges entering are added, and
// occurrence-count changes re-derive the window probability.
inline PreparedScenario prepare_window(const ScenarioConfig& cfg,
                                       const RemappedDataset& ds) {
  PreparedScenario out;
  const auto& recs = ds.edges;
  if (recs.empty()) throw DataError("dataset has no edges");
  out.initial.add_nodes(ds.ids.size());

  std::int64_t t0 = recs.front().timestamp;
  std::int64_t t_max = recs.back().timestamp;

  auto win_prob = [&](std::size_t f) {
    return std::min(kMaxProb, window_probability(static_cast<double>(f), cfg.kappa));
  };

  std::unordered_map<std::uint64_t, std::size_t> count;
  std::size_t head = 0, tail = 0;

  // Fill [t0, t0+W).
  while (head < recs.size() && recs[head].timestamp < t0 + cfg.window_w) {
    ++count[edge_key(recs[head].u, recs[head].v)];
    ++head;
  }
  for (const auto& [key, f] : count) {
    NodeId u = static_cast<NodeId>(key >> 32);
    NodeId v = static_cast<NodeId>(key & 0xffffffffULL);
    out.initial.add_edge(u, v, win_prob(f));
  }

  std::int64_t win_start = t0;
  while (win_start + cfg.window_l <= t_max) {
    win_start += cfg.window_l;
    std::int64_t win_end = win_start + cfg.window_w;
    std::map<std::uint64_t, std::size_t> old_counts;  // touched keys only

    while (tail < recs.size() && recs[tail].timestamp < win_start) {
      std::uint64_t key = edge_key(recs[tail].u, recs[tail].v);
      old_counts.emplace(key, count[key]);
      --count[key];
      ++tail;
    }
    while (head < recs.size() && recs[head].timestamp < win_end) {
      std::uint64_t key = edge_key(recs[head].u, recs[head].v);
      old_counts.emplace(key, count[key]);
      ++count[key];
      ++head;
    }

    std::vector<UpdateOp> batch;
    for (const auto& [key, before] : old_counts) {
      std::size_t now = count[key];
      if (now == before) continue;
      NodeId u = static_cast<NodeId>(key >> 32);
      NodeId v = static_cast<NodeId>(key & 0xffffffffULL);
      if (before == 0) {
        batch.push_back(UpdateOp::edge_add(u, v, win_prob(now)));
      } else if (now == 0) {
        batch.push_back(UpdateOp::edge_delete(u, v));
      } else if (now > before) {
        batch.push_back(UpdateOp::prob_increase(u, v, win_prob(now)));
      } else {
        batch.push_back(UpdateOp::prob_decrease(u, v, win_prob(now)));
      }
    }
    if (!batch.empty()) out.batches.push_back(std::move(batch));
    if (cfg.max_updates && out.batches.size() >= cfg.max_updates) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scenario execution

struct ScenarioResult {
  std::vector<MetricsRecord> records;
  std::vector<NodeId> initial_seeds;
  std::vector<NodeId> final_seeds;
};

namespace detail {

class StaticRunner {
 public:
  StaticRunner(const ScenarioConfig& cfg, UncertainGraph graph)
      : cfg_(cfg), g_(std::move(graph)) {}

  const UncertainGraph& graph() const { return g_; }

  void apply(const std::vector<UpdateOp>& ops) {
    std::vector<UpdateOp> expanded =
        cfg_.model == ProbabilityModel::Dwa ? dwa_expand_batch(g_, ops) : ops;
    UpdateBatch batch = coalesce_batch(expanded, &g_);
    for (const auto& op : batch.ops) apply_update(g_, op);
  }

  // From-scratch recomputation on the current graph.
  std::vector<NodeId> recompute(std::vector<SeedEntry>* entries = nullptr) {
    SeedState state;
    if (cfg_.algorithm == Algorithm::StaticRrs) {
      SketchIndex idx(cfg_.beta, cfg_.seed);
      idx.build(g_);
      state = select_seeds_rrs(idx, g_, cfg_.k);
    } else if (cfg_.diffusion == Diffusion::Mia) {
      SpreadEvaluator eval(g_, Theta(cfg_.theta));
      GainFn gain = [&](const std::vector<NodeId>& basis, NodeId u) {
        return eval.marginal_gain(basis, u);
      };
      state = cfg_.algorithm == Algorithm::StaticCelf ? celf(g_, cfg_.k, gain)
                                                      : greedy(g_, {}, cfg_.k, gain);
    } else {
      WorldEstimator est(g_, cfg_.eval_worlds(), cfg_.seed);
      GainFn gain = [&](const std::vector<NodeId>& basis, NodeId u) {
        return est.marginal(basis, u);
      };
      state = cfg_.algorithm == Algorithm::StaticCelf ? celf(g_, cfg_.k, gain)
                                                      : greedy(g_, {}, cfg_.k, gain);
    }
    if (entries) *entries = state.ordered;
    return state.seed_set();
  }

 private:
  ScenarioConfig cfg_;
  UncertainGraph g_;
};

inline double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

using MetricsSink = std::function<void(const MetricsRecord&)>;

// Replays the prepared update stream through the configured algorithm,
// emitting one record per update. Spread columns are Monte-Carlo estimates
// with a fixed seed so they are comparable across algorithms; MIA runs carry
// an extra exact-MIA column.
inline ScenarioResult run_prepared(const ScenarioConfig& cfg,
                                   const PreparedScenario& prepared,
                                   const MetricsSink& sink = {}) {
  bool dynamic = cfg.algorithm == Algorithm::NFamilyMia ||
                 cfg.algorithm == Algorithm::FCelf || cfg.algorithm == Algorithm::FRrs;

  std::uint64_t spread_seed = mix(cfg.seed, rng_purpose::metric_spread);
  ScenarioResult result;

  std::optional<DynamicSession> session;
  std::optional<detail::StaticRunner> runner;
  std::vector<NodeId> current_seeds;

  if (dynamic) {
    SessionConfig scfg;
    scfg.mode = cfg.algorithm == Algorithm::NFamilyMia ? Mode::MiaExact
                : cfg.algorithm == Algorithm::FCelf    ? Mode::FCelf
                                                       : Mode::FRrs;
    scfg.theta = cfg.theta;
    scfg.k = cfg.k;
    scfg.max_n = cfg.max_n;
    scfg.seed = cfg.seed;
    scfg.mc_worlds = cfg.eval_worlds();
    scfg.beta = cfg.beta;
    scfg.dwa = cfg.model == ProbabilityModel::Dwa;
    session.emplace(prepared.initial, scfg);
    current_seeds = session->seeds();
  } else {
    runner.emplace(cfg, prepared.initial);
    current_seeds = runner->recompute();
  }
  result.initial_seeds = current_seeds;
  std::vector<NodeId> frozen = current_seeds;

  for (std::size_t i = 0; i < prepared.batches.size(); ++i) {
    const auto& ops = prepared.batches[i];
    MetricsRecord rec;
    rec.update_index = i;

    auto start = std::chrono::steady_clock::now();
    if (dynamic) {
      session->apply_batch(ops);
      current_seeds = session->seeds();
    } else {
      runner->apply(ops);
      current_seeds = runner->recompute();
    }
    if (cfg.timing) rec.adjust_seconds = detail::elapsed_seconds(start);

    const UncertainGraph& g = dynamic ? session->graph() : runner->graph();
    rec.spread = mc_spread_ic(g, current_seeds, cfg.mc_count, spread_seed, cfg.threads);
    std::vector<NodeId> frozen_alive;
    for (NodeId s : frozen) {
      if (g.alive(s)) frozen_alive.push_back(s);
    }
    rec.spread_initial =
        mc_spread_ic(g, frozen_alive, cfg.mc_count, spread_seed, cfg.threads);
    if (cfg.diffusion == Diffusion::Mia) {
      rec.spread_exact_mia = spread_mia(g, current_seeds, Theta(cfg.theta));
    }
    if (dynamic) {
      const UpdateStats& st = session->last_stats();
      rec.loop_iterations = st.replacement_iterations;
      rec.tir_size = st.tir_size;
      rec.queue_entries = session->state().queue.size();
      if (const SketchIndex* idx = session->index()) {
        rec.live_sketches = idx->live_count();
        rec.retired_sketches = idx->retired_count();
        rec.sketch_weight = idx->total_weight();
      }
    }
    rec.nodes = g.node_count();
    rec.edges = g.edge_count();
    if (sink) sink(rec);
    result.records.push_back(rec);
  }
  result.final_seeds = current_seeds;
  return result;
}

inline ScenarioResult run_scenario(const ScenarioConfig& cfg, const MetricsSink& sink = {}) {
  validate_config(cfg);
  LoadMode mode = cfg.scenario == ScenarioKind::Window ? LoadMode::All
                                                       : LoadMode::FirstAppearance;
  RemappedDataset ds = remap_dataset(load_temporal_edges(cfg.dataset, mode));
  PreparedScenario prepared = cfg.scenario == ScenarioKind::Window
                                  ? prepare_window(cfg, ds)
                                  : prepare_scenario(cfg, ds);
  return run_prepared(cfg, prepared, sink);
}

inline ScenarioResult run_window(const ScenarioConfig& cfg, const MetricsSink& sink = {}) {
  if (cfg.scenario != ScenarioKind::Window) throw ConfigError("scenario must be window");
  return run_scenario(cfg, sink);
}

// ---------------------------------------------------------------------------
// Synthetic data

// Directed preferential-attachment stream: node i attaches `edges_per_node`
// out-edges to earlier nodes sampled by degree; timestamps are arrival order.
inline RemappedDataset generate_preferential_attachment(std::size_t n,
                                                        std::size_t edges_per_node,
                                                        std::uint64_t seed) {
  if (n < 2 || edges_per_node < 1) throw InvalidParam("degenerate synthetic graph");
  RemappedDataset ds;
  RngStream rng(mix(seed, rng_purpose::instance_gen));
  std::vector<NodeId> endpoint_pool;
  std::int64_t t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ds.ids.intern(static_cast<std::int64_t>(i));
  }
  endpoint_pool.push_back(0);
  for (NodeId u = 1; u < n; ++u) {
    std::size_t wanted = std::min<std::size_t>(edges_per_node, u);
    std::vector<NodeId> chosen;
    while (chosen.size() < wanted) {
      NodeId v = endpoint_pool[rng.below(endpoint_pool.size())];
      if (v == u || std::find(chosen.begin(), chosen.end(), v) != chosen.end()) {
        // Fall back to a uniform pick to guarantee progress on tiny pools.
        v = static_cast<NodeId>(rng.below(u));
        if (v == u || std::find(chosen.begin(), chosen.end(), v) != chosen.end()) continue;
      }
      chosen.push_back(v);
    }
    for (NodeId v : chosen) {
      ds.edges.push_back({u, v, t++, 1.0});
      endpoint_pool.push_back(v);
    }
    endpoint_pool.push_back(u);
  }
  return ds;
}

inline std::string dataset_to_edge_list(const RemappedDataset& ds) {
  std::ostringstream os;
  for (const auto& e : ds.edges) {
    os << e.u << ' ' << e.v << ' ' << e.timestamp << '\n';
  }
  return os.str();
}

}  // namespace dynim
