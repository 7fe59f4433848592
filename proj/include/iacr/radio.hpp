#pragma once

#include <span>
#include <vector>

#include "iacr/types.hpp"

namespace iacr {

struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

using Placement = std::vector<Position>;

double distance(const Position& a, const Position& b);

struct ChannelModel {
  double alpha = 3.0;                 // path-loss exponent
  double noise_variance = 1e-10;      // W
  double detection_threshold = 1e-8;  // W, minimum received power of a neighbor
  bool sir_mode = false;              // treat noise as negligible

  void validate() const;
};

/// One radiating node as seen by a receiver.
struct Transmitter {
  NodeId id = 0;
  double power = 0.0;  // W
};

struct LinkBudget {
  double signal_power = 0.0;
  double interference_power = 0.0;
  double sinr = 0.0;
};

/// p_t / d^alpha. Throws GeometryError for d <= 0.
double received_power(double p_t, double d, double alpha);

/// Sum of p_k / d(receiver, k)^alpha over `active`, skipping `receiver` and
/// `intended_tx`. Throws GeometryError if a counted transmitter sits on the receiver.
double aggregate_interference(NodeId receiver, NodeId intended_tx,
                              std::span<const Transmitter> active, const Placement& placement,
                              double alpha);

/// signal / (interference + noise), or signal / interference in SIR mode. A zero
/// denominator yields +infinity, which clears every finite threshold.
double sinr(double signal, double interference, const ChannelModel& channel);

LinkBudget link_budget(NodeId tx, NodeId rx, double tx_power,
                       std::span<const Transmitter> concurrent, const Placement& placement,
                       const ChannelModel& channel);

/// Nodes whose received power from `node` at `p_max` reaches the detection
/// threshold, in ascending id order.
std::vector<NodeId> neighbors_of(NodeId node, const Placement& placement,
                                 const ChannelModel& channel, double p_max);

std::vector<std::vector<NodeId>> neighbor_graph(const Placement& placement,
                                                const ChannelModel& channel, double p_max);

}  // namespace iacr
