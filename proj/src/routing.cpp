#include "iacr/routing.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

namespace iacr {

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::IACR: return "IACR";
    case Protocol::MHC: return "MHC";
    case Protocol::IAEE: return "IAEE";
  }
  return "?";
}

Protocol parse_protocol(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "IACR") return Protocol::IACR;
  if (upper == "MHC") return Protocol::MHC;
  if (upper == "IAEE") return Protocol::IAEE;
  throw std::invalid_argument("unknown protocol '" + std::string(text) + "'");
}

MetricPolicy MetricPolicy::iacr(double delta, CreatedTerm created) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0, 1]");
  return {Protocol::IACR, delta, created};
}

MetricPolicy MetricPolicy::mhc() { return {Protocol::MHC, 0.0, CreatedTerm::ExcludeRelay}; }
MetricPolicy MetricPolicy::iaee() { return {Protocol::IAEE, 0.0, CreatedTerm::ExcludeRelay}; }

double link_metric(const MetricPolicy& policy, NodeId candidate, const InformationTable& table) {
  if (policy.kind == Protocol::MHC) return 1.0;
  const InfoRow* row = table.fresh_row(candidate);
  if (row == nullptr) return kInfinity;
  if (policy.kind == Protocol::IAEE) return row->received_at_neighbor;
  const double created = policy.created == CreatedTerm::ExcludeRelay ? row->aggregate_created
                                                                      : table.created_total();
  return policy.delta * created + (1.0 - policy.delta) * row->received_at_neighbor;
}

void RoutingTable::install(const RoutingTableEntry& entry) { entries_[entry.destination] = entry; }

const RoutingTableEntry* RoutingTable::find(NodeId destination, double now) const {
  auto it = entries_.find(destination);
  if (it == entries_.end()) return nullptr;
  if (now - it->second.last_used > lifetime_) return nullptr;
  return &it->second;
}

void RoutingTable::touch(NodeId destination, double now) {
  auto it = entries_.find(destination);
  if (it != entries_.end()) it->second.last_used = std::max(it->second.last_used, now);
}

bool route_preferred(double cost_a, std::size_t hops_a, std::span<const NodeId> path_a,
                     double cost_b, std::size_t hops_b, std::span<const NodeId> path_b) {
  if (cost_a != cost_b) return cost_a < cost_b;
  if (hops_a != hops_b) return hops_a < hops_b;
  return std::lexicographical_compare(path_a.begin(), path_a.end(), path_b.begin(), path_b.end());
}

std::vector<RouteRequest> Router::forward_copies(const RouteRequest& base,
                                                 const InformationTable& table,
                                                 const MetricPolicy& policy,
                                                 std::span<const NodeId> neighbors) const {
  std::vector<RouteRequest> copies;
  for (NodeId k : neighbors) {
    if (std::find(base.trace.begin(), base.trace.end(), k) != base.trace.end()) continue;
    const double m = link_metric(policy, k, table);
    if (m == kInfinity) continue;
    RouteRequest copy = base;
    copy.transmitter = self_;
    copy.next_hop_hint = k;
    copy.accumulated_metric = accumulate(base.accumulated_metric, m);
    copy.hop_count = static_cast<std::uint32_t>(base.trace.size());
    copies.push_back(std::move(copy));
  }
  return copies;
}

RreqForward Router::originate(NodeId destination, const InformationTable& table,
                              const MetricPolicy& policy, std::span<const NodeId> neighbors) {
  RouteRequest base;
  base.source = self_;
  base.destination = destination;
  base.transmitter = self_;
  base.sequence = next_sequence_++;
  base.trace = {self_};
  best_[{self_, base.sequence}] = Candidate{0.0, 0, base.trace, self_};
  return RreqForward{forward_copies(base, table, policy, neighbors)};
}

RreqAction Router::handle_rreq(const RouteRequest& rreq, const InformationTable& table,
                               const MetricPolicy& policy, std::span<const NodeId> neighbors) {
  if (rreq.next_hop_hint != self_) return RreqDrop{RreqDrop::Reason::NotAddressed};
  if (std::find(rreq.trace.begin(), rreq.trace.end(), self_) != rreq.trace.end())
    return RreqDrop{RreqDrop::Reason::Loop};

  Candidate incoming{rreq.accumulated_metric, rreq.hop_count, rreq.trace, rreq.transmitter};
  incoming.trace.push_back(self_);

  const Key key{rreq.source, rreq.sequence};
  auto it = best_.find(key);
  const bool first = it == best_.end();
  if (!first && !route_preferred(incoming.metric, incoming.hops, incoming.trace, it->second.metric,
                                 it->second.hops, it->second.trace)) {
    return RreqDrop{RreqDrop::Reason::NotImproving};
  }
  best_[key] = incoming;

  if (rreq.destination == self_) return RreqAtDestination{first};

  RouteRequest base = rreq;
  base.accumulated_metric = incoming.metric;
  base.trace = incoming.trace;
  return RreqForward{forward_copies(base, table, policy, neighbors)};
}

std::optional<RouteReply> Router::make_reply(NodeId source, std::uint64_t sequence) const {
  auto it = best_.find({source, sequence});
  if (it == best_.end() || it->second.trace.size() < 2) return std::nullopt;
  RouteReply reply;
  reply.source = source;
  reply.destination = self_;
  reply.transmitter = self_;
  reply.next_hop = it->second.previous;
  reply.route_metric = it->second.metric;
  reply.sequence = sequence;
  reply.path = it->second.trace;
  return reply;
}

RrepAction Router::handle_rrep(const RouteReply& rrep, double now) {
  if (rrep.next_hop != self_) return RrepDrop{RrepDrop::Reason::NotAddressed};
  const Key key{rrep.source, rrep.sequence};
  auto it = best_.find(key);
  if (it == best_.end()) {
    ++failures_;
    return RrepDrop{RrepDrop::Reason::NoReversePath};
  }
  if (!replied_.insert(key).second) return RrepDrop{RrepDrop::Reason::Duplicate};

  RoutingTableEntry entry;
  entry.destination = rrep.destination;
  entry.next_hop = rrep.transmitter;
  entry.metric = rrep.route_metric;
  entry.sequence = rrep.sequence;
  auto at = std::find(rrep.path.begin(), rrep.path.end(), self_);
  entry.hop_count = at == rrep.path.end()
                        ? 0
                        : static_cast<std::uint32_t>(std::distance(at, rrep.path.end()) - 1);
  entry.established_at = now;
  entry.last_used = now;
  routing_table_.install(entry);

  if (rrep.source == self_) return RouteEstablished{entry, rrep.path};

  // Follow the path the destination chose. It can differ from this node's own best
  // if a better copy arrived here but never reached the destination.
  RouteReply forward = rrep;
  forward.transmitter = self_;
  forward.next_hop = at != rrep.path.end() && at != rrep.path.begin() ? *std::prev(at)
                                                                      : it->second.previous;
  return RrepForward{std::move(forward)};
}

}  // namespace iacr
