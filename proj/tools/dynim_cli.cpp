#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynim/dynim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct RunOptions {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::vector<std::string> overrides;
  bool quiet = false;
};

int run_command(const RunOptions& opts) {
  dynim::ScenarioConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = dynim::parse_config_file(opts.config_path);
  }
  for (const auto& kv : opts.overrides) {
    std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw dynim::ConfigError("override must be key=value, got '" + kv + "'");
    }
    dynim::set_config_field(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.format != "csv" && opts.format != "json") {
    throw dynim::ConfigError("format must be csv or json");
  }
  dynim::validate_config(cfg);
  if (cfg.dataset.empty()) throw dynim::ConfigError("no dataset configured");

  dynim::MetricsSink sink;
  if (!opts.quiet) {
    sink = [](const dynim::MetricsRecord& r) {
      std::cerr << "update " << r.update_index << ": spread " << r.spread
                << ", adjust " << r.adjust_seconds << "s, tir " << r.tir_size
                << "\n";
    };
  }
  dynim::ScenarioResult result = dynim::run_scenario(cfg, sink);
  if (!opts.out_path.empty()) {
    dynim::emit_metrics(result.records,
                        opts.format == "csv" ? dynim::MetricsFormat::Csv
                                             : dynim::MetricsFormat::Json,
                        opts.out_path);
  } else {
    std::cout << (opts.format == "csv" ? dynim::metrics_to_csv(result.records)
                                       : dynim::metrics_to_json(result.records));
  }
  return kExitOk;
}

int fixture_command(bool check, const std::string& export_path) {
  dynim::UncertainGraph g = dynim::build_paper_fixture();
  if (check) {
    std::cout << "fixture ok: " << g.node_count() << " nodes, " << g.edge_count()
              << " edges\n";
  }
  if (!export_path.empty()) {
    std::ofstream f(export_path);
    if (!f) throw dynim::DataError("cannot write " + export_path);
    f << dynim::export_snapshot(g);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynim: influence maximization on evolving uncertain graphs"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "replay a scenario and emit metrics");
  run->add_option("--config", run_opts.config_path, "key=value config file");
  run->add_option("--out", run_opts.out_path, "metrics output path (default stdout)");
  run->add_option("--format", run_opts.format, "csv|json (default csv)");
  run->add_option("--set", run_opts.overrides,
                  "config override key=value (repeatable; any config key)");
  run->add_flag("--quiet", run_opts.quiet, "suppress per-update progress");
  // Mirror every config field as a direct flag.
  for (const char* key :
       {"dataset", "model", "diffusion", "algorithm", "scenario", "k", "theta",
        "beta", "mc_count", "mc_eval", "max_n", "split", "window_w", "window_l",
        "kappa", "seed", "threads", "max_updates", "timing"}) {
    run->add_option_function<std::string>(
        std::string("--") + key,
        [key, &run_opts](const std::string& v) {
          run_opts.overrides.push_back(std::string(key) + "=" + v);
        },
        std::string("override config key '") + key + "'");
  }

  bool fixture_check = false;
  std::string fixture_export;
  auto* fixture = app.add_subcommand("fixture", "validate the running-example graph");
  fixture->add_flag("--check", fixture_check, "re-validate all fixture constraints");
  fixture->add_option("--export", fixture_export, "write the fixture as 'u v p' lines");

  try {
    app.parse(argc, argv);
    if (run->parsed()) return run_command(run_opts);
    if (fixture->parsed()) return fixture_command(fixture_check, fixture_export);
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  } catch (const dynim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dynim::FixtureUnsatisfiable& e) {
    std::cerr << "fixture error: " << e.what() << "\n";
    return kExitData;
  } catch (const dynim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
