#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "iacr/routing.hpp"

namespace iacr {

struct FlowSpec {
  NodeId source = 0;
  NodeId destination = 0;
  double start = 0;  // s

  friend bool operator==(const FlowSpec&, const FlowSpec&) = default;
};

/// Full parameterization of one simulation run.
struct ScenarioConfig {
  std::size_t n_nodes = 20;
  double area_side = 1000.0;            // m
  double p_max = 1.0;                   // W
  double alpha = 3.0;
  double noise_variance = 1e-10;        // W
  double detection_threshold = 3.7e-8;  // W, about 300 m of range at the defaults
  double sinr_threshold_db = 4.0;
  double delta = 0.5;
  Protocol protocol = Protocol::IACR;
  CreatedTerm created_term = CreatedTerm::ExcludeRelay;
  bool sir_mode = false;
  bool power_adaptation = false;
  double power_margin_db = 3.0;
  double data_rate = 1e6;         // bit/s
  std::uint32_t packet_size = 4096;  // bit
  double send_interval = 0.1;     // s
  double hello_interval = 0.2;    // s
  double establishment_time = 3.0;  // s
  double sim_duration = 13.0;     // s
  double reply_wait = 0.05;       // s a destination collects requests before replying
  double discovery_timeout = 0.5;  // s before a source retries discovery
  double route_lifetime = 2.0;    // s an unused routing entry survives
  std::vector<FlowSpec> flows;
  std::size_t random_flows = 0;  // drawn from the seed when `flows` is empty
  std::uint64_t seed = 1;

  ChannelModel channel() const;
  MetricPolicy policy() const;
  double sinr_threshold_ratio() const { return db_to_ratio(sinr_threshold_db); }

  /// Throws ConfigError (line 0) on out-of-range values.
  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parses `key = value` lines. `#` starts a comment. Flows are written as
///   flows = [
///     0 -> 5 @ 3.0
///     2 -> 7 @ 3.5
///   ]
/// (or on one line, entries separated by `,`). Unknown keys are errors.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

/// Applies one `key=value` assignment on top of `config` (command-line overrides).
void apply_override(ScenarioConfig& config, std::string_view assignment);

/// Writes every field, defaults included; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& config);

/// Shortest round-trippable decimal form of `value`.
std::string format_double(double value);

}  // namespace iacr
