#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <span>
#include <vector>

#include "iacr/config.hpp"
#include "iacr/info_table.hpp"
#include "iacr/routing.hpp"
#include "iacr/scenario.hpp"
#include "iacr/trace.hpp"

namespace iacr {

/// Control frame sizes, in bits.
inline constexpr std::uint32_t kHelloBits = 128;
/// ICP section appended to a HELLO that carries a request or replies.
inline constexpr std::uint32_t kIcpBits = 256;
inline constexpr std::uint32_t kRouteControlBits = 512;

/// Interference measurements average each node's radiated power over this many
/// HELLO intervals.
inline constexpr double kInterferenceWindowEpochs = 5.0;

inline constexpr std::size_t kRerouteWindow = 5;
inline constexpr std::size_t kRerouteViolations = 3;
inline constexpr std::size_t kRerouteBudget = 3;        // rediscoveries per flow ...
inline constexpr double kRerouteBudgetWindow = 10.0;    // ... per this many seconds
inline constexpr std::uint32_t kDiscoveryAttempts = 3;

/// Forwarding delays are drawn from U[0, jitter) to desynchronize relays.
inline constexpr double kRreqJitter = 0.010;
inline constexpr double kRrepJitter = 0.001;

/// Data-frame power never drops below p_max / kPowerFloorDivisor.
inline constexpr double kPowerFloorDivisor = 100.0;

enum class EventKind {
  Hello,
  RouteDiscover,
  DataSend,
  FrameStart,
  FrameDelivery,
  ReplyTimer,
  DiscoveryTimeout,
  RerouteCheck,
  SimEnd,
};

struct Event {
  double time = 0;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::SimEnd;
  NodeId subject = 0;
  std::uint64_t payload = 0;
};

/// Min-queue on (time, sequence). Scheduling before the last popped time throws
/// ConsistencyError.
class EventQueue {
 public:
  void schedule(double time, EventKind kind, NodeId subject, std::uint64_t payload = 0);
  Event pop();
  bool empty() const { return queue_.empty(); }
  std::size_t size() const { return queue_.size(); }
  double now() const { return now_; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.sequence > b.sequence;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_sequence_ = 0;
  double now_ = 0;
};

struct Flow {
  std::uint32_t id = 0;
  NodeId source = 0;
  NodeId destination = 0;
  std::uint32_t packet_size = 4096;
  double send_interval = 0.1;
  double start_time = 0;
  std::uint64_t packets_sent = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t packets_lost = 0;
  std::vector<NodeId> route;  // empty until a route is established
  bool failed = false;
};

struct NodeState {
  NodeId id = 0;
  Position position;
  double tx_power = 0;
  double cooperation_delta = 0;
  double energy_consumed = 0;
  InformationTable information_table;
  Router router{0};
  std::vector<NodeId> neighbor_set;  // discovered from HELLOs, ascending
  double hello_phase = 0;
};

struct Reception {
  bool delivered = false;
  LinkBudget budget;
};

/// Delivered iff the link SINR against `concurrent` reaches the threshold (inclusive).
Reception adjudicate_reception(NodeId tx, NodeId rx, double tx_power,
                               std::span<const Transmitter> concurrent, const Placement& placement,
                               const ChannelModel& channel, double sinr_threshold_ratio);

struct PowerDecision {
  double power = 0;
  bool marginal = false;  // the target needed more than p_max
};

/// Lowest power that meets threshold * margin against `interference` at the next
/// hop, clamped to [p_max / kPowerFloorDivisor, p_max].
PowerDecision adapt_power(double p_max, double sinr_threshold_ratio, double margin_db,
                          double interference, const ChannelModel& channel, double distance);

enum class RerouteDecision { Keep, Rediscover };

/// Looks at the last kRerouteWindow samples; rediscovers when at least
/// kRerouteViolations of them fall below the threshold.
RerouteDecision reroute_check(std::span<const double> recent_route_sinr, double sinr_threshold_ratio);

/// Transmit energy of one frame, in joules.
double account_energy(double tx_power, std::uint32_t bits, double data_rate);

/// Runs one scenario to completion. Identical inputs produce identical traces.
SimulationTrace run(const ScenarioConfig& config);
SimulationTrace run(const ScenarioConfig& config, const Scenario& scenario);

/// A run plus every node's information table as it stood at the end.
struct SimulationOutcome {
  SimulationTrace trace;
  std::vector<InformationTable> tables;
};
SimulationOutcome simulate(const ScenarioConfig& config, const Scenario& scenario);

}  // namespace iacr
