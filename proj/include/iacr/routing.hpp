#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "iacr/info_table.hpp"

namespace iacr {

enum class Protocol { IACR, MHC, IAEE };

std::string_view to_string(Protocol p);
/// Accepts "IACR", "MHC", "IAEE" in any case; throws std::invalid_argument otherwise.
Protocol parse_protocol(std::string_view text);

/// Which created-interference quantity feeds the cooperative term.
enum class CreatedTerm {
  ExcludeRelay,  // information-table aggregate: everything except the chosen relay
  AllNeighbors,  // everything the transmitter creates, relay included
};

struct MetricPolicy {
  Protocol kind = Protocol::IACR;
  double delta = 0.5;  // cooperation weight, IACR only
  CreatedTerm created = CreatedTerm::ExcludeRelay;

  static MetricPolicy iacr(double delta, CreatedTerm created = CreatedTerm::ExcludeRelay);
  static MetricPolicy mhc();
  static MetricPolicy iaee();

  friend bool operator==(const MetricPolicy&, const MetricPolicy&) = default;
};

/// Cost of relaying from the table's owner to `candidate`. Infinite when the
/// policy needs a table row and the candidate has no fresh one.
double link_metric(const MetricPolicy& policy, NodeId candidate, const InformationTable& table);

inline double accumulate(double route_cost, double link_cost) { return route_cost + link_cost; }

struct RouteRequest {
  NodeId source = 0;
  NodeId destination = 0;
  NodeId transmitter = 0;
  NodeId next_hop_hint = 0;       // neighbor this copy's metric was computed for
  double accumulated_metric = 0;  // route cost up to and including next_hop_hint
  std::uint64_t sequence = 0;
  std::uint32_t hop_count = 0;  // hops from source to next_hop_hint
  std::vector<NodeId> trace;    // source .. transmitter
};

struct RouteReply {
  NodeId source = 0;
  NodeId destination = 0;
  NodeId transmitter = 0;
  NodeId next_hop = 0;
  double route_metric = 0;
  std::uint64_t sequence = 0;
  std::vector<NodeId> path;  // source .. destination as selected by the destination
};

struct RoutingTableEntry {
  NodeId destination = 0;
  NodeId next_hop = 0;
  double metric = 0;
  std::uint64_t sequence = 0;
  std::uint32_t hop_count = 0;
  double established_at = 0;
  double last_used = 0;
};

/// One live entry per destination; entries lapse `lifetime` seconds after last use.
class RoutingTable {
 public:
  explicit RoutingTable(double lifetime = kInfinity) : lifetime_(lifetime) {}

  void install(const RoutingTableEntry& entry);
  /// Live entry for `destination` at `now`, or nullptr. Does not refresh it.
  const RoutingTableEntry* find(NodeId destination, double now) const;
  /// Marks the entry used at `now`.
  void touch(NodeId destination, double now);
  void erase(NodeId destination) { entries_.erase(destination); }
  std::size_t size() const { return entries_.size(); }

 private:
  double lifetime_;
  std::map<NodeId, RoutingTableEntry> entries_;
};

/// One broadcast frame carrying a per-neighbor copy of the request.
struct RreqForward {
  std::vector<RouteRequest> copies;
};
/// The request reached its destination; `first` when this is the first copy seen.
struct RreqAtDestination {
  bool first = false;
};
struct RreqDrop {
  enum class Reason { Loop, NotImproving, NotAddressed };
  Reason reason = Reason::NotImproving;
};
using RreqAction = std::variant<RreqForward, RreqAtDestination, RreqDrop>;

struct RrepForward {
  RouteReply reply;
};
struct RouteEstablished {
  RoutingTableEntry entry;
  std::vector<NodeId> path;
};
struct RrepDrop {
  enum class Reason { NoReversePath, Duplicate, NotAddressed };
  Reason reason = Reason::NoReversePath;
};
using RrepAction = std::variant<RrepForward, RouteEstablished, RrepDrop>;

/// Per-node route-establishment state machine. Requests flood with per-link
/// cost accumulation; a node re-forwards only copies that improve on the best
/// (cost, hop count, node sequence) it has seen for that discovery.
class Router {
 public:
  explicit Router(NodeId self, double route_lifetime = kInfinity)
      : self_(self), routing_table_(route_lifetime) {}

  NodeId id() const { return self_; }

  /// Starts a discovery towards `destination`. The returned copies cover every
  /// neighbor with a finite link cost; empty when there is none.
  RreqForward originate(NodeId destination, const InformationTable& table,
                        const MetricPolicy& policy, std::span<const NodeId> neighbors);

  RreqAction handle_rreq(const RouteRequest& rreq, const InformationTable& table,
                         const MetricPolicy& policy, std::span<const NodeId> neighbors);

  /// Reply for a discovery that reached this node, along its best reverse path.
  std::optional<RouteReply> make_reply(NodeId source, std::uint64_t sequence) const;

  RrepAction handle_rrep(const RouteReply& rrep, double now);

  RoutingTable& routing_table() { return routing_table_; }
  const RoutingTable& routing_table() const { return routing_table_; }
  std::uint64_t last_sequence() const { return next_sequence_ - 1; }
  std::uint64_t establishment_failures() const { return failures_; }

 private:
  struct Candidate {
    double metric = 0;
    std::uint32_t hops = 0;
    std::vector<NodeId> trace;  // source .. this node
    NodeId previous = 0;
  };
  using Key = std::pair<NodeId, std::uint64_t>;

  std::vector<RouteRequest> forward_copies(const RouteRequest& base, const InformationTable& table,
                                           const MetricPolicy& policy,
                                           std::span<const NodeId> neighbors) const;

  NodeId self_;
  RoutingTable routing_table_;
  std::uint64_t next_sequence_ = 1;
  std::uint64_t failures_ = 0;
  std::map<Key, Candidate> best_;
  std::set<Key> replied_;
};

/// Deterministic route preference: lower cost, then fewer hops, then the
/// lexicographically smaller node sequence.
bool route_preferred(double cost_a, std::size_t hops_a, std::span<const NodeId> path_a,
                     double cost_b, std::size_t hops_b, std::span<const NodeId> path_b);

}  // namespace iacr
