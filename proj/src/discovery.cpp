#include "iacr/discovery.hpp"

#include <algorithm>
#include <deque>
#include <queue>

namespace iacr {

namespace {

struct Label {
  double cost = 0;
  std::vector<NodeId> path;
};

bool better(const Label& a, const Label& b) {
  return route_preferred(a.cost, a.path.size(), a.path, b.cost, b.path.size(), b.path);
}

double edge_cost(std::span<const InformationTable> tables, const MetricPolicy& policy, NodeId from,
                 NodeId to) {
  return link_metric(policy, to, tables[from]);
}

}  // namespace

std::optional<Route> oracle_exhaustive(const Adjacency& graph,
                                       std::span<const InformationTable> tables,
                                       const MetricPolicy& policy, NodeId source,
                                       NodeId destination) {
  std::optional<Label> best;
  Label current{0.0, {source}};
  std::vector<bool> on_path(graph.size(), false);
  on_path[source] = true;

  // Explicit-stack DFS would not buy anything at <= 12 nodes.
  auto dfs = [&](auto&& self, NodeId at) -> void {
    if (at == destination) {
      if (!best || better(current, *best)) best = current;
      return;
    }
    for (NodeId next : graph[at]) {
      if (on_path[next]) continue;
      const double m = edge_cost(tables, policy, at, next);
      if (m == kInfinity) continue;
      const double saved = current.cost;
      current.cost = accumulate(current.cost, m);
      current.path.push_back(next);
      on_path[next] = true;
      self(self, next);
      on_path[next] = false;
      current.path.pop_back();
      current.cost = saved;
    }
  };
  if (source == destination) return std::nullopt;
  dfs(dfs, source);
  if (!best) return std::nullopt;
  return Route{best->path, best->cost};
}

std::optional<Route> oracle_dijkstra(const Adjacency& graph,
                                     std::span<const InformationTable> tables,
                                     const MetricPolicy& policy, NodeId source,
                                     NodeId destination) {
  if (source == destination) return std::nullopt;
  auto worse = [](const Label& a, const Label& b) { return better(b, a); };
  std::priority_queue<Label, std::vector<Label>, decltype(worse)> open(worse);
  std::vector<bool> settled(graph.size(), false);
  open.push(Label{0.0, {source}});
  while (!open.empty()) {
    Label top = open.top();
    open.pop();
    const NodeId at = top.path.back();
    if (settled[at]) continue;
    settled[at] = true;
    if (at == destination) return Route{std::move(top.path), top.cost};
    for (NodeId next : graph[at]) {
      if (settled[next]) continue;
      const double m = edge_cost(tables, policy, at, next);
      if (m == kInfinity) continue;
      Label extended{accumulate(top.cost, m), top.path};
      extended.path.push_back(next);
      open.push(std::move(extended));
    }
  }
  return std::nullopt;
}

std::optional<Route> oracle_best_route(const Adjacency& graph,
                                       std::span<const InformationTable> tables,
                                       const MetricPolicy& policy, NodeId source,
                                       NodeId destination) {
  if (graph.size() <= kExhaustiveOracleLimit)
    return oracle_exhaustive(graph, tables, policy, source, destination);
  return oracle_dijkstra(graph, tables, policy, source, destination);
}

std::optional<std::size_t> bfs_hops(const Adjacency& graph, NodeId source, NodeId destination) {
  std::vector<std::size_t> dist(graph.size(), SIZE_MAX);
  std::deque<NodeId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const NodeId at = queue.front();
    queue.pop_front();
    if (at == destination) return dist[at];
    for (NodeId next : graph[at]) {
      if (dist[next] != SIZE_MAX) continue;
      dist[next] = dist[at] + 1;
      queue.push_back(next);
    }
  }
  return std::nullopt;
}

FloodResult discover_by_flooding(const Adjacency& graph, std::span<const InformationTable> tables,
                                 const MetricPolicy& policy, NodeId source, NodeId destination) {
  FloodResult result;
  std::vector<Router> routers;
  routers.reserve(graph.size());
  for (NodeId i = 0; i < graph.size(); ++i) routers.emplace_back(i);

  std::deque<RouteRequest> in_flight;
  auto broadcast = [&](const RreqForward& frame) {
    if (frame.copies.empty()) return;
    ++result.rreq_frames;
    for (const RouteRequest& copy : frame.copies) in_flight.push_back(copy);
  };

  broadcast(routers[source].originate(destination, tables[source], policy, graph[source]));
  const std::uint64_t sequence = routers[source].last_sequence();

  bool reached = false;
  while (!in_flight.empty()) {
    RouteRequest rreq = std::move(in_flight.front());
    in_flight.pop_front();
    const NodeId at = rreq.next_hop_hint;
    RreqAction action = routers[at].handle_rreq(rreq, tables[at], policy, graph[at]);
    if (auto* fwd = std::get_if<RreqForward>(&action)) {
      for (const RouteRequest& copy : fwd->copies)
        if (copy.accumulated_metric < rreq.accumulated_metric) result.metric_monotone = false;
      broadcast(*fwd);
    } else if (std::holds_alternative<RreqAtDestination>(action)) {
      reached = true;
    }
  }
  if (!reached) return result;

  std::optional<RouteReply> reply = routers[destination].make_reply(source, sequence);
  // Each hop strictly improves the reverse-path label, so this terminates.
  while (reply) {
    RrepAction action = routers[reply->next_hop].handle_rrep(*reply, 0.0);
    if (auto* fwd = std::get_if<RrepForward>(&action)) {
      reply = fwd->reply;
    } else if (auto* done = std::get_if<RouteEstablished>(&action)) {
      result.installed_metric = done->entry.metric;
      break;
    } else {
      return result;
    }
  }

  Route route;
  route.path.push_back(source);
  NodeId at = source;
  while (at != destination) {
    const RoutingTableEntry* entry = routers[at].routing_table().find(destination, 0.0);
    if (entry == nullptr || route.path.size() > graph.size()) return result;
    route.cost = accumulate(route.cost, edge_cost(tables, policy, at, entry->next_hop));
    at = entry->next_hop;
    route.path.push_back(at);
  }
  result.route = std::move(route);
  return result;
}

std::vector<InformationTable> collect_static_tables(const Placement& placement,
                                                    const ChannelModel& channel,
                                                    const Adjacency& graph, double p_max) {
  std::vector<Transmitter> everyone;
  everyone.reserve(placement.size());
  for (NodeId k = 0; k < placement.size(); ++k) everyone.push_back({k, p_max});

  std::vector<InformationTable> tables;
  tables.reserve(placement.size());
  for (NodeId i = 0; i < placement.size(); ++i) {
    InformationTable table(i);
    for (const InfoCollectionMessage& request : refresh(table, graph[i], 0.0, 1.0, p_max)) {
      auto reply =
          handle_icp_request(request.destination, request, placement, channel, everyone);
      if (reply) table.ingest(*reply);
    }
    tables.push_back(std::move(table));
  }
  return tables;
}

}  // namespace iacr
