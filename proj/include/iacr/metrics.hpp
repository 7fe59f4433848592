#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "iacr/trace.hpp"

namespace iacr {

/// Delivered over sent; 0 when nothing was sent. Throws ConsistencyError when
/// delivered exceeds sent.
double throughput(std::uint64_t delivered, std::uint64_t sent);

/// Fraction of samples at or below the threshold. Throws UndefinedMetricError
/// on an empty sample.
double outage(std::span<const double> sinr_samples, double threshold_ratio);

/// Metrics of one run, recomputed from its trace alone.
struct RunMetrics {
  std::uint64_t packets_sent = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t packets_lost = 0;
  std::uint64_t packets_in_flight = 0;
  std::uint64_t outage_samples = 0;
  std::uint64_t outage_events = 0;
  std::size_t flows = 0;
  std::size_t failed_flows = 0;
  double throughput = 0;   // pooled over flows
  double outage = 0;       // over per-packet route SINR minima, plus missed sends of failed flows
  double mean_energy = 0;  // joules per node
  double total_energy = 0;

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

RunMetrics compute_metrics(const SimulationTrace& trace);

/// `key = value` lines with 12 significant digits for reals.
std::string format_metrics(const RunMetrics& metrics);
RunMetrics parse_metrics(const std::string& text);

}  // namespace iacr
