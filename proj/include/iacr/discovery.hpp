#pragma once

#include <optional>
#include <span>
#include <vector>

#include "iacr/routing.hpp"

namespace iacr {

using Adjacency = std::vector<std::vector<NodeId>>;

struct Route {
  std::vector<NodeId> path;  // source .. destination
  double cost = 0;

  std::size_t hops() const { return path.empty() ? 0 : path.size() - 1; }
};

/// Graphs at or below this size are searched exhaustively by oracle_best_route.
inline constexpr std::size_t kExhaustiveOracleLimit = 12;

/// Minimum-cost route under the policy's link metrics, ties broken by
/// route_preferred. Costs are accumulated from the source in path order.
std::optional<Route> oracle_best_route(const Adjacency& graph,
                                       std::span<const InformationTable> tables,
                                       const MetricPolicy& policy, NodeId source,
                                       NodeId destination);

/// Enumerates every simple path.
std::optional<Route> oracle_exhaustive(const Adjacency& graph,
                                       std::span<const InformationTable> tables,
                                       const MetricPolicy& policy, NodeId source,
                                       NodeId destination);

/// Label-setting shortest path keyed on the full preference order.
std::optional<Route> oracle_dijkstra(const Adjacency& graph,
                                     std::span<const InformationTable> tables,
                                     const MetricPolicy& policy, NodeId source,
                                     NodeId destination);

/// Fewest-hop distance, or nullopt when unreachable.
std::optional<std::size_t> bfs_hops(const Adjacency& graph, NodeId source, NodeId destination);

struct FloodResult {
  std::optional<Route> route;     // followed hop by hop through the installed tables
  double installed_metric = 0;    // metric of the source's routing entry
  std::size_t rreq_frames = 0;    // broadcast frames sent during the flood
  bool metric_monotone = true;    // no forwarded copy carried less than the copy it came from
};

/// Runs the distributed RREQ/RREP exchange over lossless links, delivering frames
/// in FIFO order, and returns the route the source ends up with.
FloodResult discover_by_flooding(const Adjacency& graph, std::span<const InformationTable> tables,
                                 const MetricPolicy& policy, NodeId source, NodeId destination);

/// Complete, fresh information tables for a static placement with every other node
/// radiating `p_max`, as the handshake produces when every reply is delivered.
std::vector<InformationTable> collect_static_tables(const Placement& placement,
                                                    const ChannelModel& channel,
                                                    const Adjacency& graph, double p_max);

}  // namespace iacr
