#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "iacr/config.hpp"
#include "iacr/metrics.hpp"

namespace iacr {

enum class SweptParameter { NodeCount, SinrThreshold };

std::string_view to_string(SweptParameter p);
SweptParameter parse_swept_parameter(std::string_view text);

struct SweepSpec {
  SweptParameter parameter = SweptParameter::NodeCount;
  std::vector<double> values;  // strictly increasing
  ScenarioConfig base;
  std::vector<std::uint64_t> seeds;
  std::vector<Protocol> protocols = {Protocol::IACR, Protocol::MHC, Protocol::IAEE};
  /// When positive, each run carries round(n_nodes * flows_per_node) random
  /// flows (at least one) instead of the base config's flows.
  double flows_per_node = 0.1;

  /// Throws ConfigError on an empty or non-increasing value list or no seeds.
  void validate() const;
  /// The base config specialized to one cell and seed.
  ScenarioConfig cell_config(Protocol protocol, double value, std::uint64_t seed) const;
};

/// Aggregate of one (protocol, swept value) cell over its seeds.
struct MetricsRecord {
  std::string scenario_id;
  Protocol protocol = Protocol::IACR;
  std::size_t n_nodes = 0;
  double sinr_threshold_db = 0;
  double delta = 0;
  std::size_t seeds_aggregated = 0;
  double throughput = 0;
  double throughput_stderr = 0;
  double outage = 0;
  double outage_stderr = 0;
  double mean_energy = 0;
  double energy_stderr = 0;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

struct SeedResult {
  Protocol protocol = Protocol::IACR;
  double value = 0;
  std::uint64_t seed = 0;
  RunMetrics metrics;
};

struct SweepResult {
  std::vector<MetricsRecord> records;  // ordered by (protocol, value)
  std::vector<SeedResult> per_seed;    // ordered by (protocol, value, seed)
  std::vector<std::string> failures;   // one message per failed run
};

struct MeanStderr {
  double mean = 0;
  double stderr_ = 0;
};

/// Arithmetic mean and standard error (sample deviation / sqrt(n); 0 for n = 1).
MeanStderr mean_stderr(const std::vector<double>& values);

/// Runs every (protocol, value, seed) combination on up to `jobs` threads and
/// reduces in (protocol, value, seed) order. A cell whose runs all fail is
/// omitted from `records`.
SweepResult run_sweep(const SweepSpec& spec, unsigned jobs = 1);

inline constexpr std::string_view kCsvHeader =
    "protocol,n_nodes,sinr_threshold_db,delta,seed_count,throughput_mean,throughput_stderr,"
    "outage_mean,outage_stderr,energy_mean_j,energy_stderr_j";

void write_csv(std::ostream& out, const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> parse_csv(std::istream& in);

/// Per-seed rows (protocol, value, seed, throughput, outage, energy).
void write_per_seed_csv(std::ostream& out, const std::vector<SeedResult>& rows);

/// Full reproduction record: swept parameter, values, seeds, protocols and the
/// effective base config.
std::string format_manifest(const SweepSpec& spec);

/// Parses `key = value` sweep files: the scenario keys plus `sweep`, `values`,
/// `seeds` (list or `a..b` range), `protocols` and `flows_per_node`.
SweepSpec parse_sweep_spec(std::string_view text);

}  // namespace iacr
