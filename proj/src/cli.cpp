#include "qtherm/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qtherm/config.hpp"
#include "qtherm/ensemble.hpp"
#include "qtherm/export_data.hpp"
#include "qtherm/records_io.hpp"

namespace qtherm {
namespace {

// options that may override the config file
struct Cli {
  std::string config;
  std::string experiment;
  long long n = 0;
  uint64_t seed = 0;
  double dt = 0;
  int threads = 0;
  bool single_thread = false;
  std::string out;
  bool export_records = false;
  bool export_series = false;
  long long max_nodes = 1000000;
  std::vector<std::string> params;
};

double parse_param_value(const std::string& text) {
  if (text == "inf") return kInf;
  if (text == "-inf") return -kInf;
  size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ValidationError("parameter value '" + text + "' is not a number");
  }
  if (used != text.size())
    throw ValidationError("parameter value '" + text + "' is not a number");
  return v;
}

RunConfig load_config(const Cli& a, const CLI::App* cmd) {
  auto given = [cmd](const std::string& name) {
    const auto* opt = cmd->get_option_no_throw(name);
    return opt && opt->count() > 0;
  };
  RunConfig cfg;
  if (!a.config.empty()) cfg = parse_config_file(a.config);
  if (given("--experiment")) cfg.experiment = a.experiment;
  if (given("--n")) cfg.n = a.n;
  if (given("--seed")) cfg.seed = a.seed;
  if (given("--dt")) cfg.dt = a.dt;
  if (given("--threads")) cfg.threads = a.threads;
  if (a.single_thread) cfg.threads = 1;
  if (given("--out")) cfg.out_dir = a.out;
  if (a.export_records) cfg.export_records = true;
  if (a.export_series) cfg.export_series = true;
  for (const auto& kv : a.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ValidationError("--param expects key=value, got '" + kv + "'");
    cfg.params[kv.substr(0, eq)] = parse_param_value(kv.substr(eq + 1));
  }
  if (cfg.experiment.empty())
    throw ValidationError("no experiment selected: pass --config or --experiment");
  cfg.validate();
  return cfg;
}

std::string resolve_out_dir(const RunConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("QTHERM_OUT_DIR"); env && *env) return env;
  return "qtherm-out";
}

void print_estimators(const std::vector<std::pair<std::string, EstimatorResult>>& es) {
  for (const auto& [name, e] : es)
    std::cout << name << " " << fmt17(e.value) << " +- " << fmt17(e.std_error)
              << " (n=" << e.n << ")\n";
}

int cmd_run(const Cli& a, const CLI::App* cmd) {
  const RunConfig cfg = load_config(a, cmd);
  const ExperimentSpec spec = cfg.build_experiment();
  RunOptions opt;
  opt.threads = cfg.threads;
  opt.keep_records = cfg.export_records;
  opt.keep_step_series = cfg.export_series;
  const EnsembleStats stats = run_ensemble(spec, cfg.n, cfg.seed, opt);

  const std::string dir = resolve_out_dir(cfg);
  std::vector<std::string> files = export_tables(dir, stats);
  if (cfg.export_records) {
    const std::string p = dir + "/records.jsonl";
    write_records(p, stats);
    files.push_back(p);
  }

  std::cout << "experiment " << spec.name << "\n"
            << "n " << stats.n << "\n"
            << "seed " << stats.master_seed << "\n"
            << "dt " << fmt17(stats.dt) << "\n"
            << "divergent " << stats.divergent << "\n";
  if (stats.p_no_jump)
    std::cout << "p_no_jump " << fmt17(*stats.p_no_jump) << "\n";
  print_estimators(build_estimators(stats.trajectories));
  for (const auto& f : files) std::cout << "wrote " << f << "\n";
  return 0;
}

int cmd_enumerate(const Cli& a, const CLI::App* cmd) {
  const RunConfig cfg = load_config(a, cmd);
  const ExperimentSpec spec = cfg.build_experiment();
  const auto leaves = enumerate_trajectories(spec, a.max_nodes);

  const std::string dir = resolve_out_dir(cfg);
  const auto files = export_enumeration(dir, leaves);

  double total = 0;
  for (const auto& leaf : leaves) total += leaf.prob;
  std::cout << "experiment " << spec.name << "\n"
            << "leaves " << leaves.size() << "\n"
            << "total_prob " << fmt17(total) << "\n";
  std::vector<ProtocolResult> rs;
  std::vector<double> ws;
  for (const auto& leaf : leaves) {
    rs.push_back(leaf.result);
    ws.push_back(leaf.prob);
  }
  print_estimators(build_estimators(rs, ws));
  for (const auto& f : files) std::cout << "wrote " << f << "\n";
  return 0;
}

int cmd_validate(const Cli& a, const CLI::App* cmd) {
  const RunConfig cfg = load_config(a, cmd);
  const ExperimentSpec spec = cfg.build_experiment();
  std::cout << "ok " << spec.name << "\n"
            << "dt " << fmt17(spec.dt) << "\n"
            << "duration " << fmt17(spec.total_duration()) << "\n"
            << "phases " << spec.phases.size() << "\n"
            << "n " << cfg.n << "\n"
            << "seed " << cfg.seed << "\n";
  return 0;
}

int cmd_presets() {
  for (const auto& p : preset_registry()) {
    std::cout << p.name << ": " << p.summary << "\n";
    for (const auto& [key, value] : p.defaults)
      std::cout << "  " << key << " = " << fmt17(value) << "\n";
  }
  return 0;
}

void add_common(CLI::App* cmd, Cli& a, bool sampling) {
  cmd->add_option("-c,--config", a.config, "config file (key = value format)");
  cmd->add_option("-e,--experiment", a.experiment, "preset experiment name");
  cmd->add_option("--dt", a.dt, "time step override");
  cmd->add_option("-o,--out", a.out, "output directory");
  cmd->add_option("-p,--param", a.params,
                  "preset parameter key=value (repeatable)");
  if (sampling) {
    cmd->add_option("-n,--n", a.n, "number of trajectories");
    cmd->add_option("-s,--seed", a.seed, "master RNG seed");
    cmd->add_option("-t,--threads", a.threads, "worker threads (0 = hardware)");
    cmd->add_flag("--single-thread", a.single_thread, "force one worker");
  }
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"stochastic quantum-trajectory simulator with thermodynamic ledgers"};
  app.require_subcommand(1);
  Cli a;

  auto* run = app.add_subcommand("run", "sample an ensemble and write tables");
  add_common(run, a, true);
  run->add_flag("--export-records", a.export_records,
                "also write per-trajectory records.jsonl");
  run->add_flag("--export-series", a.export_series,
                "keep per-step ledger series in the records");

  auto* enumerate =
      app.add_subcommand("enumerate", "walk every discrete outcome exactly");
  add_common(enumerate, a, false);
  enumerate->add_option("--max-nodes", a.max_nodes, "outcome tree node budget");

  auto* validate =
      app.add_subcommand("validate", "check a configuration without running");
  add_common(validate, a, true);

  auto* presets =
      app.add_subcommand("presets", "list preset experiments and their defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(a, run);
    if (enumerate->parsed()) return cmd_enumerate(a, enumerate);
    if (validate->parsed()) return cmd_validate(a, validate);
    if (presets->parsed()) return cmd_presets();
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ProtocolError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace qtherm
