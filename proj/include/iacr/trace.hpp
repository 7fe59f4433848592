#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iacr/routing.hpp"

namespace iacr {

enum class FrameKind { Hello, Rreq, Rrep, Data };

std::string_view to_string(FrameKind kind);
FrameKind parse_frame_kind(std::string_view text);

/// A frame put on the air, with the energy it cost its transmitter.
struct TxRecord {
  double time = 0;
  NodeId node = 0;
  FrameKind frame = FrameKind::Data;
  std::uint32_t bits = 0;
  double power = 0;
  double energy = 0;
  bool marginal = false;  // power adaptation wanted more than p_max
};

/// One data hop adjudicated at its receiver.
struct HopRecord {
  double time = 0;
  NodeId tx = 0;
  NodeId rx = 0;
  std::uint32_t flow = 0;
  std::uint64_t packet = 0;
  double signal = 0;
  double interference = 0;
  double sinr = 0;
  bool delivered = false;
};

/// End-to-end fate of a data packet. `route_sinr` is the minimum over the hops
/// it attempted (0 when it was dropped for lack of a route).
struct PacketRecord {
  double time = 0;
  std::uint32_t flow = 0;
  std::uint64_t packet = 0;
  bool delivered = false;
  double route_sinr = 0;
  std::uint32_t hops = 0;
};

enum class RouteEventKind { Discover, Established, Failed, Reroute, Timeout };

std::string_view to_string(RouteEventKind kind);
RouteEventKind parse_route_event(std::string_view text);

struct RouteRecord {
  double time = 0;
  std::uint32_t flow = 0;
  RouteEventKind event = RouteEventKind::Discover;
  NodeId node = 0;
  std::uint64_t sequence = 0;
  std::uint32_t attempt = 0;
  double metric = 0;
  std::vector<NodeId> path;
};

/// Per-flow totals at simulation end. `missed` counts send opportunities of a
/// flow that never obtained a route.
struct FlowRecord {
  double time = 0;
  std::uint32_t flow = 0;
  NodeId source = 0;
  NodeId destination = 0;
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t lost = 0;
  std::uint64_t in_flight = 0;
  std::uint64_t missed = 0;
  bool failed = false;
};

/// Per-node totals at simulation end.
struct NodeRecord {
  double time = 0;
  NodeId node = 0;
  double x = 0;
  double y = 0;
  double energy = 0;
  double tx_power = 0;
};

using TraceRecord = std::variant<TxRecord, HopRecord, PacketRecord, RouteRecord, FlowRecord, NodeRecord>;

struct TraceHeader {
  std::size_t n_nodes = 0;
  Protocol protocol = Protocol::IACR;
  double sinr_threshold_db = 0;
  double delta = 0;
  std::uint64_t seed = 0;
  double sim_duration = 0;

  friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

struct SimulationTrace {
  TraceHeader header;
  std::vector<TraceRecord> records;  // nondecreasing time
};

/// Line format, one record per line:
///   <time> <kind> <subject> key=value ...
/// preceded by a `# iacr-trace 1` line and a `header` line. Times carry 9
/// decimals; other reals are written in shortest round-trip form.
void write_trace(std::ostream& out, const SimulationTrace& trace);
std::string serialize_trace(const SimulationTrace& trace);
/// Throws ConfigError with the offending line number.
SimulationTrace parse_trace(std::istream& in);

}  // namespace iacr
