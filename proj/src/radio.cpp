#include "iacr/radio.hpp"

#include <cmath>
#include <string>

namespace iacr {

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

void ChannelModel::validate() const {
  if (!(alpha >= 2.0)) throw std::invalid_argument("path-loss exponent must be >= 2");
  if (!(noise_variance >= 0.0)) throw std::invalid_argument("noise variance must be >= 0");
  if (!(detection_threshold > 0.0)) throw std::invalid_argument("detection threshold must be > 0");
}

double received_power(double p_t, double d, double alpha) {
  if (!(d > 0.0)) throw GeometryError("non-positive link distance " + std::to_string(d));
  return p_t / std::pow(d, alpha);
}

double aggregate_interference(NodeId receiver, NodeId intended_tx,
                              std::span<const Transmitter> active, const Placement& placement,
                              double alpha) {
  const Position& at = placement.at(receiver);
  double total = 0.0;
  for (const Transmitter& k : active) {
    if (k.id == receiver || k.id == intended_tx) continue;
    total += received_power(k.power, distance(at, placement.at(k.id)), alpha);
  }
  return total;
}

double sinr(double signal, double interference, const ChannelModel& channel) {
  const double denominator = channel.sir_mode ? interference : interference + channel.noise_variance;
  if (denominator <= 0.0) return kInfinity;
  return signal / denominator;
}

LinkBudget link_budget(NodeId tx, NodeId rx, double tx_power,
                       std::span<const Transmitter> concurrent, const Placement& placement,
                       const ChannelModel& channel) {
  LinkBudget budget;
  budget.signal_power =
      received_power(tx_power, distance(placement.at(tx), placement.at(rx)), channel.alpha);
  budget.interference_power = aggregate_interference(rx, tx, concurrent, placement, channel.alpha);
  budget.sinr = sinr(budget.signal_power, budget.interference_power, channel);
  return budget;
}

std::vector<NodeId> neighbors_of(NodeId node, const Placement& placement,
                                 const ChannelModel& channel, double p_max) {
  std::vector<NodeId> out;
  const Position& at = placement.at(node);
  for (NodeId j = 0; j < placement.size(); ++j) {
    if (j == node) continue;
    if (received_power(p_max, distance(at, placement[j]), channel.alpha) >=
        channel.detection_threshold) {
      out.push_back(j);
    }
  }
  return out;
}

std::vector<std::vector<NodeId>> neighbor_graph(const Placement& placement,
                                                const ChannelModel& channel, double p_max) {
  std::vector<std::vector<NodeId>> graph(placement.size());
  for (NodeId i = 0; i < placement.size(); ++i)
    graph[i] = neighbors_of(i, placement, channel, p_max);
  return graph;
}

}  // namespace iacr
