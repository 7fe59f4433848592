// Command-line driver: single runs, sweeps, the oracle check and trace replay.
//
// Exit status: 0 on success, 1 when a run fails or a check disagrees, 2 on a
// malformed config or command line.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "iacr/config.hpp"
#include "iacr/metrics.hpp"
#include "iacr/oracle_check.hpp"
#include "iacr/simulator.hpp"
#include "iacr/sweep.hpp"
#include "iacr/trace.hpp"

namespace fs = std::filesystem;
using namespace iacr;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitBadInput = 2;

fs::path default_output_dir() {
  if (const char* env = std::getenv("IACR_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

// Readers never see a half-written file.
void write_atomically(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void report_config_error(const ConfigError& e, const std::string& file) {
  // The message already carries the line number when there is one.
  std::cerr << fmt::format("{}: {}\n", file, e.what());
}

struct Overrides {
  std::vector<std::string> assignments;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> protocol;

  void attach(CLI::App* cmd) {
    cmd->add_option("--set", assignments, "Override a config key (key=value), repeatable");
    cmd->add_option("--seed", seed, "Override the seed");
    cmd->add_option("--protocol", protocol, "Override the protocol (IACR, MHC, IAEE)");
  }

  void apply(ScenarioConfig& config) const {
    for (const std::string& a : assignments) apply_override(config, a);
    if (seed) config.seed = *seed;
    if (protocol) apply_override(config, "protocol=" + *protocol);
    config.validate();
  }
};

int cmd_run(const std::string& config_path, const Overrides& overrides, fs::path out_dir) {
  ScenarioConfig config;
  try {
    config = parse_config(read_file(config_path));
    overrides.apply(config);
  } catch (const ConfigError& e) {
    report_config_error(e, config_path);
    return kExitBadInput;
  }
  const std::string stem = fs::path(config_path).stem().string();
  try {
    const SimulationTrace trace = run(config);
    const RunMetrics metrics = compute_metrics(trace);
    const std::string metrics_text = format_metrics(metrics);
    write_atomically(out_dir / (stem + ".trace"), serialize_trace(trace));
    write_atomically(out_dir / (stem + ".metrics"), metrics_text);
    write_atomically(out_dir / (stem + ".config"), serialize_config(config));
    std::cout << metrics_text;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}

int cmd_sweep(const std::string& spec_path, const Overrides& overrides, unsigned jobs,
              fs::path out_dir) {
  SweepSpec spec;
  try {
    spec = parse_sweep_spec(read_file(spec_path));
    overrides.apply(spec.base);
  } catch (const ConfigError& e) {
    report_config_error(e, spec_path);
    return kExitBadInput;
  }
  const std::string stem = fs::path(spec_path).stem().string();
  try {
    const SweepResult result = run_sweep(spec, jobs);
    std::ostringstream csv, per_seed;
    write_csv(csv, result.records);
    write_per_seed_csv(per_seed, result.per_seed);
    write_atomically(out_dir / (stem + ".csv"), csv.str());
    write_atomically(out_dir / (stem + ".per_seed.csv"), per_seed.str());
    write_atomically(out_dir / (stem + ".manifest"), format_manifest(spec));
    std::cout << csv.str();
    for (const std::string& f : result.failures) std::cerr << "run failed: " << f << '\n';
    return result.failures.empty() ? 0 : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "sweep failed: " << e.what() << '\n';
    return kExitFailure;
  }
}

int cmd_oracle_check(const std::string& config_path, const Overrides& overrides, std::size_t nodes,
                     std::size_t trials) {
  ScenarioConfig config;
  try {
    if (!config_path.empty()) config = parse_config(read_file(config_path));
    overrides.apply(config);
  } catch (const ConfigError& e) {
    report_config_error(e, config_path.empty() ? "<flags>" : config_path);
    return kExitBadInput;
  }
  const OracleCheckReport report = oracle_check(nodes, trials, config.seed, config);
  for (const std::string& d : report.details) std::cout << d << '\n';
  std::cout << fmt::format("{} trials, {} comparisons, {} mismatches\n", report.trials,
                           report.comparisons, report.mismatches);
  return report.mismatches == 0 ? 0 : kExitFailure;
}

int cmd_replay(const std::string& trace_path, std::string metrics_path) {
  SimulationTrace trace;
  try {
    std::istringstream in(read_file(trace_path));
    trace = parse_trace(in);
  } catch (const ConfigError& e) {
    report_config_error(e, trace_path);
    return kExitBadInput;
  }
  RunMetrics recomputed;
  try {
    recomputed = compute_metrics(trace);
  } catch (const std::exception& e) {
    std::cerr << "replay failed: " << e.what() << '\n';
    return kExitFailure;
  }
  const std::string text = format_metrics(recomputed);
  std::cout << text;
  if (metrics_path.empty()) {
    fs::path sibling = trace_path;
    sibling.replace_extension(".metrics");
    if (!fs::exists(sibling)) return 0;
    metrics_path = sibling.string();
  }
  std::string stored;
  try {
    stored = read_file(metrics_path);
    parse_metrics(stored);
  } catch (const ConfigError& e) {
    report_config_error(e, metrics_path);
    return kExitBadInput;
  }
  if (stored == text) {
    std::cout << "metrics identical\n";
    return 0;
  }
  std::cout << "metrics differ from " << metrics_path << '\n';
  return kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Packet-level simulator for interference-aware routing"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir_flag;
  app.add_option("--out", out_dir_flag, "Output directory (default: $IACR_OUTPUT_DIR or .)");

  std::string config_path, metrics_path;
  Overrides overrides;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::size_t nodes = 8, trials = 200;

  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario, write its trace and metrics");
  run_cmd->add_option("config", config_path, "Scenario config file")->required();
  overrides.attach(run_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep and write CSVs");
  sweep_cmd->add_option("spec", config_path, "Sweep spec file")->required();
  sweep_cmd->add_option("--jobs,-j", jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  overrides.attach(sweep_cmd);

  auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare flooded routes with the oracle");
  oracle_cmd->add_option("config", config_path, "Optional scenario config for channel parameters");
  oracle_cmd->add_option("--nodes", nodes, "Nodes per placement")->check(CLI::Range(2, 64));
  oracle_cmd->add_option("--trials", trials, "Placements to check");
  overrides.attach(oracle_cmd);

  auto* replay_cmd = app.add_subcommand("replay", "Recompute metrics from a trace and diff them");
  replay_cmd->add_option("trace", config_path, "Trace file")->required();
  replay_cmd->add_option("--metrics", metrics_path,
                         "Stored metrics to compare (default: sibling .metrics file)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }

  const fs::path out_dir = out_dir_flag.empty() ? default_output_dir() : fs::path(out_dir_flag);
  try {
    if (*run_cmd) return cmd_run(config_path, overrides, out_dir);
    if (*sweep_cmd) return cmd_sweep(config_path, overrides, jobs, out_dir);
    if (*oracle_cmd) return cmd_oracle_check(config_path, overrides, nodes, trials);
    return cmd_replay(config_path, metrics_path);
  } catch (const ConfigError& e) {
    report_config_error(e, config_path);
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
