#include "iacr/metrics.hpp"

#include <charconv>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "iacr/types.hpp"

namespace iacr {

double throughput(std::uint64_t delivered, std::uint64_t sent) {
  if (delivered > sent) throw ConsistencyError("more packets delivered than sent");
  if (sent == 0) return 0.0;
  return static_cast<double>(delivered) / static_cast<double>(sent);
}

double outage(std::span<const double> sinr_samples, double threshold_ratio) {
  if (sinr_samples.empty()) throw UndefinedMetricError("outage of an empty sample");
  std::size_t below = 0;
  for (double s : sinr_samples)
    if (s <= threshold_ratio) ++below;
  return static_cast<double>(below) / static_cast<double>(sinr_samples.size());
}

RunMetrics compute_metrics(const SimulationTrace& trace) {
  RunMetrics m;
  const double threshold = db_to_ratio(trace.header.sinr_threshold_db);
  std::vector<double> samples;
  for (const TraceRecord& record : trace.records) {
    if (const auto* p = std::get_if<PacketRecord>(&record)) {
      samples.push_back(p->route_sinr);
    } else if (const auto* f = std::get_if<FlowRecord>(&record)) {
      ++m.flows;
      m.packets_sent += f->sent;
      m.packets_delivered += f->delivered;
      m.packets_lost += f->lost;
      m.packets_in_flight += f->in_flight;
      if (f->failed) {
        ++m.failed_flows;
        samples.insert(samples.end(), f->missed, 0.0);
      }
      if (f->delivered + f->lost + f->in_flight != f->sent)
        throw ConsistencyError("flow " + std::to_string(f->flow) + " does not conserve packets");
    } else if (const auto* n = std::get_if<NodeRecord>(&record)) {
      m.total_energy += n->energy;
    }
  }
  m.throughput = throughput(m.packets_delivered, m.packets_sent);
  m.outage_samples = samples.size();
  if (!samples.empty()) {
    m.outage = outage(samples, threshold);
    for (double s : samples)
      if (s <= threshold) ++m.outage_events;
  }
  m.mean_energy = trace.header.n_nodes == 0 ? 0.0
                                            : m.total_energy / static_cast<double>(trace.header.n_nodes);
  return m;
}

std::string format_metrics(const RunMetrics& m) {
  std::string out;
  out += fmt::format("packets_sent = {}\n", m.packets_sent);
  out += fmt::format("packets_delivered = {}\n", m.packets_delivered);
  out += fmt::format("packets_lost = {}\n", m.packets_lost);
  out += fmt::format("packets_in_flight = {}\n", m.packets_in_flight);
  out += fmt::format("outage_samples = {}\n", m.outage_samples);
  out += fmt::format("outage_events = {}\n", m.outage_events);
  out += fmt::format("flows = {}\n", m.flows);
  out += fmt::format("failed_flows = {}\n", m.failed_flows);
  out += fmt::format("throughput = {:.12g}\n", m.throughput);
  out += fmt::format("outage = {:.12g}\n", m.outage);
  out += fmt::format("mean_energy_j = {:.12g}\n", m.mean_energy);
  out += fmt::format("total_energy_j = {:.12g}\n", m.total_energy);
  return out;
}

RunMetrics parse_metrics(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
    kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError(0, "metrics missing '" + key + "'");
    return it->second;
  };
  auto integer = [&](const std::string& key) { return std::stoull(get(key)); };
  auto real = [&](const std::string& key) {
    const std::string& v = get(key);
    double out = 0;
    std::from_chars(v.data(), v.data() + v.size(), out);
    return out;
  };
  RunMetrics m;
  m.packets_sent = integer("packets_sent");
  m.packets_delivered = integer("packets_delivered");
  m.packets_lost = integer("packets_lost");
  m.packets_in_flight = integer("packets_in_flight");
  m.outage_samples = integer("outage_samples");
  m.outage_events = integer("outage_events");
  m.flows = integer("flows");
  m.failed_flows = integer("failed_flows");
  m.throughput = real("throughput");
  m.outage = real("outage");
  m.mean_energy = real("mean_energy_j");
  m.total_energy = real("total_energy_j");
  return m;
}

}  // namespace iacr
