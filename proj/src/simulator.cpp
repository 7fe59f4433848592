#include "iacr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <unordered_map>

namespace iacr {

void EventQueue::schedule(double time, EventKind kind, NodeId subject, std::uint64_t payload) {
  if (time < now_) throw ConsistencyError("event scheduled in the past");
  queue_.push(Event{time, next_sequence_++, kind, subject, payload});
}

Event EventQueue::pop() {
  Event e = queue_.top();
  queue_.pop();
  now_ = e.time;
  return e;
}

Reception adjudicate_reception(NodeId tx, NodeId rx, double tx_power,
                               std::span<const Transmitter> concurrent, const Placement& placement,
                               const ChannelModel& channel, double sinr_threshold_ratio) {
  Reception r;
  r.budget = link_budget(tx, rx, tx_power, concurrent, placement, channel);
  r.delivered = r.budget.sinr >= sinr_threshold_ratio;
  return r;
}

PowerDecision adapt_power(double p_max, double sinr_threshold_ratio, double margin_db,
                          double interference, const ChannelModel& channel, double distance) {
  const double noise = channel.sir_mode ? 0.0 : channel.noise_variance;
  const double required = sinr_threshold_ratio * db_to_ratio(margin_db) * (interference + noise) *
                          std::pow(distance, channel.alpha);
  PowerDecision d;
  d.marginal = required > p_max;
  d.power = std::clamp(required, p_max / kPowerFloorDivisor, p_max);
  return d;
}

RerouteDecision reroute_check(std::span<const double> recent_route_sinr,
                              double sinr_threshold_ratio) {
  const std::size_t n = std::min(recent_route_sinr.size(), kRerouteWindow);
  const auto window = recent_route_sinr.last(n);
  const auto below = std::count_if(window.begin(), window.end(),
                                   [&](double s) { return s < sinr_threshold_ratio; });
  return static_cast<std::size_t>(below) >= kRerouteViolations ? RerouteDecision::Rediscover
                                                               : RerouteDecision::Keep;
}

double account_energy(double tx_power, std::uint32_t bits, double data_rate) {
  return tx_power * (static_cast<double>(bits) / data_rate);
}

namespace {

struct Frame {
  std::uint64_t id = 0;
  FrameKind kind = FrameKind::Data;
  NodeId tx = 0;
  double power = 0;
  std::uint32_t bits = 0;
  double start = 0;
  double end = 0;
  bool marginal = false;
  std::vector<NodeId> receivers;
  bool carries_request = false;
  InfoCollectionMessage icp;
  std::vector<InfoCollectionMessage> icp_replies;
  std::vector<RouteRequest> copies;
  RouteReply reply;
  std::uint64_t packet = 0;
};

struct AirFrame {
  std::uint64_t id = 0;
  NodeId tx = 0;
  double power = 0;
  double start = 0;
  double end = 0;
};

struct PacketState {
  std::uint32_t flow = 0;
  std::uint64_t number = 0;
  double min_sinr = kInfinity;
  std::uint32_t hops = 0;
};

struct FlowState {
  Flow flow;
  std::uint64_t next_packet = 0;
  std::uint32_t attempts = 0;
  std::uint64_t pending_sequence = 0;  // 0 when no discovery is outstanding
  bool ever_established = false;
  bool sending = false;
  std::deque<double> window;
  std::deque<double> reroute_times;
  std::uint64_t in_flight = 0;
};

struct DiscoveryContext {
  std::uint32_t flow = 0;
  std::uint64_t sequence = 0;
};

struct ReplyContext {
  NodeId source = 0;
  std::uint64_t sequence = 0;
};

class Simulation {
 public:
  Simulation(const ScenarioConfig& config, const Scenario& scenario)
      : config_(config),
        channel_(config.channel()),
        policy_(config.policy()),
        threshold_(config.sinr_threshold_ratio()),
        placement_(scenario.placement),
        rng_(config.seed ^ 0x9E3779B97F4A7C15ULL),
        window_(kInterferenceWindowEpochs * config.hello_interval) {
    config_.validate();
    channel_.validate();
    check_placement(placement_);
    if (placement_.size() != config_.n_nodes)
      throw ConsistencyError("placement size does not match n_nodes");
    radio_neighbors_ = neighbor_graph(placement_, channel_, config_.p_max);

    nodes_.resize(placement_.size());
    radiated_.resize(placement_.size());
    radiated_sum_.assign(placement_.size(), 0.0);
    pending_replies_.resize(placement_.size());
    for (NodeId i = 0; i < nodes_.size(); ++i) {
      NodeState& n = nodes_[i];
      n.id = i;
      n.position = placement_[i];
      n.tx_power = config_.p_max;
      n.cooperation_delta = config_.delta;
      n.information_table = InformationTable(i);
      n.router = Router(i, config_.route_lifetime);
      n.hello_phase = scenario.hello_phase.empty() ? 0.0 : scenario.hello_phase.at(i);
    }
    for (std::uint32_t f = 0; f < scenario.flows.size(); ++f) {
      const FlowSpec& spec = scenario.flows[f];
      if (spec.source >= nodes_.size() || spec.destination >= nodes_.size() ||
          spec.source == spec.destination || spec.start < config_.establishment_time)
        throw ConsistencyError("invalid flow " + std::to_string(f));
      FlowState s;
      s.flow.id = f;
      s.flow.source = spec.source;
      s.flow.destination = spec.destination;
      s.flow.packet_size = config_.packet_size;
      s.flow.send_interval = config_.send_interval;
      s.flow.start_time = spec.start;
      flows_.push_back(std::move(s));
    }
  }

  SimulationOutcome run() {
    trace_.header = TraceHeader{config_.n_nodes, config_.protocol, config_.sinr_threshold_db,
                                config_.delta, config_.seed, config_.sim_duration};
    for (const NodeState& n : nodes_) schedule(n.hello_phase, EventKind::Hello, n.id);
    for (const FlowState& f : flows_)
      schedule(f.flow.start_time, EventKind::RouteDiscover, f.flow.source, f.flow.id);
    queue_.schedule(config_.sim_duration, EventKind::SimEnd, 0);

    while (!queue_.empty()) {
      const Event e = queue_.pop();
      if (e.kind == EventKind::SimEnd) break;
      dispatch(e);
    }
    finish();
    SimulationOutcome out;
    out.trace = std::move(trace_);
    for (NodeState& n : nodes_) out.tables.push_back(std::move(n.information_table));
    return out;
  }

 private:
  double now() const { return queue_.now(); }

  // Events past the end of the run are dropped.
  void schedule(double time, EventKind kind, NodeId subject, std::uint64_t payload = 0) {
    if (time > config_.sim_duration) return;
    queue_.schedule(time, kind, subject, payload);
  }

  void dispatch(const Event& e) {
    switch (e.kind) {
      case EventKind::Hello: on_hello(e.subject); break;
      case EventKind::RouteDiscover: on_route_discover(static_cast<std::uint32_t>(e.payload)); break;
      case EventKind::DataSend: on_data_send(static_cast<std::uint32_t>(e.payload)); break;
      case EventKind::FrameStart: on_frame_start(e.payload); break;
      case EventKind::FrameDelivery: on_frame_delivery(e.payload); break;
      case EventKind::ReplyTimer: on_reply_timer(e.subject, e.payload); break;
      case EventKind::DiscoveryTimeout: on_discovery_timeout(e.payload); break;
      case EventKind::RerouteCheck: on_reroute_check(static_cast<std::uint32_t>(e.payload)); break;
      case EventKind::SimEnd: break;
    }
  }

  // ---- radio ----------------------------------------------------------------

  bool protected_frame(const Frame& f) const {
    return f.kind != FrameKind::Data && f.start < config_.establishment_time;
  }

  std::uint64_t new_frame(Frame f) {
    f.id = next_frame_id_++;
    const std::uint64_t id = f.id;
    frames_.emplace(id, std::move(f));
    return id;
  }

  void transmit_later(Frame f, double delay) {
    const std::uint64_t id = new_frame(std::move(f));
    if (now() + delay > config_.sim_duration) {
      frames_.erase(id);
      return;
    }
    schedule(now() + delay, EventKind::FrameStart, 0, id);
  }

  void transmit_now(Frame f) { on_frame_start(new_frame(std::move(f))); }

  void on_frame_start(std::uint64_t id) {
    Frame& f = frames_.at(id);
    f.start = now();
    f.end = now() + static_cast<double>(f.bits) / config_.data_rate;
    const double energy = account_energy(f.power, f.bits, config_.data_rate);
    NodeState& node = nodes_[f.tx];
    node.energy_consumed += energy;
    trace_.records.push_back(TxRecord{now(), f.tx, f.kind, f.bits, f.power, energy, f.marginal});

    air_.push_back(AirFrame{f.id, f.tx, f.power, f.start, f.end});
    radiated_[f.tx].emplace_back(f.start, energy);
    radiated_sum_[f.tx] += energy;
    if (f.end > config_.sim_duration) {
      frames_.erase(id);  // still interferes, never adjudicated
      return;
    }
    queue_.schedule(f.end, EventKind::FrameDelivery, f.tx, id);
  }

  std::vector<Transmitter> concurrent_with(const Frame& f) {
    // Frames that ended long ago cannot overlap anything still pending.
    const double horizon = now() - 0.05;
    while (!air_.empty() && air_.front().end < horizon && air_.front().start < horizon)
      air_.pop_front();
    std::vector<Transmitter> out;
    for (const AirFrame& a : air_) {
      if (a.id == f.id || a.tx == f.tx) continue;
      if (a.start < f.end && a.end > f.start) out.push_back({a.tx, a.power});
    }
    return out;
  }

  /// Time-averaged radiated power of every node over the measurement window.
  std::vector<Transmitter> average_radiators() {
    std::vector<Transmitter> out;
    out.reserve(nodes_.size());
    const double cutoff = now() - window_;
    for (NodeId k = 0; k < nodes_.size(); ++k) {
      auto& q = radiated_[k];
      while (!q.empty() && q.front().first < cutoff) {
        radiated_sum_[k] -= q.front().second;
        q.pop_front();
      }
      if (q.empty()) radiated_sum_[k] = 0.0;  // drop accumulated rounding
      if (radiated_sum_[k] > 0.0) out.push_back({k, radiated_sum_[k] / window_});
    }
    return out;
  }

  void on_frame_delivery(std::uint64_t id) {
    auto it = frames_.find(id);
    if (it == frames_.end()) return;
    Frame f = std::move(it->second);
    frames_.erase(it);
    const std::vector<Transmitter> concurrent = concurrent_with(f);

    auto receive = [&](NodeId rx) -> Reception {
      Reception r = adjudicate_reception(f.tx, rx, f.power, concurrent, placement_, channel_,
                                         threshold_);
      if (protected_frame(f)) r.delivered = true;
      return r;
    };

    switch (f.kind) {
      case FrameKind::Hello: {
        std::vector<Transmitter> radiators;
        for (NodeId rx : f.receivers) {
          if (!receive(rx).delivered) continue;
          auto& nbrs = nodes_[rx].neighbor_set;
          auto pos = std::lower_bound(nbrs.begin(), nbrs.end(), f.tx);
          if (pos == nbrs.end() || *pos != f.tx) nbrs.insert(pos, f.tx);
          for (const InfoCollectionMessage& reply : f.icp_replies)
            if (reply.destination == rx) nodes_[rx].information_table.ingest(reply);
          if (!f.carries_request) continue;
          if (radiators.empty()) radiators = average_radiators();
          InfoCollectionMessage request = f.icp;
          request.destination = rx;
          auto reply = handle_icp_request(rx, request, placement_, channel_, radiators);
          if (!reply) continue;
          // Answered on the replier's next HELLO; a newer request supersedes an older one.
          auto& queued = pending_replies_[rx];
          std::erase_if(queued, [&](const InfoCollectionMessage& m) { return m.destination == f.tx; });
          queued.push_back(*reply);
        }
        break;
      }
      case FrameKind::Rreq: {
        for (const RouteRequest& copy : f.copies) {
          const NodeId rx = copy.next_hop_hint;
          if (!receive(rx).delivered) continue;
          handle_rreq(rx, copy);
        }
        break;
      }
      case FrameKind::Rrep: {
        const NodeId rx = f.reply.next_hop;
        if (!receive(rx).delivered) break;
        handle_rrep(rx, f.reply);
        break;
      }
      case FrameKind::Data: {
        const NodeId rx = f.receivers.front();
        const Reception r = receive(rx);
        PacketState& p = packets_.at(f.packet);
        p.min_sinr = std::min(p.min_sinr, r.budget.sinr);
        ++p.hops;
        trace_.records.push_back(HopRecord{now(), f.tx, rx, p.flow, p.number, r.budget.signal_power,
                                           r.budget.interference_power, r.budget.sinr,
                                           r.delivered});
        if (!r.delivered) {
          finish_packet(f.packet, false);
        } else if (rx == flows_[p.flow].flow.destination) {
          finish_packet(f.packet, true);
        } else {
          forward_data(rx, f.packet);
        }
        break;
      }
    }
  }

  // ---- information collection -------------------------------------------------

  void on_hello(NodeId id) {
    NodeState& n = nodes_[id];
    const auto requests = refresh(n.information_table, n.neighbor_set, now(),
                                  config_.hello_interval, config_.p_max, n.hello_phase);
    Frame f;
    f.kind = FrameKind::Hello;
    f.tx = id;
    f.power = config_.p_max;
    f.bits = kHelloBits;
    f.receivers = radio_neighbors_[id];
    if (!requests.empty()) {
      f.carries_request = true;
      f.icp = requests.front();
    }
    f.icp_replies = std::move(pending_replies_[id]);
    pending_replies_[id].clear();
    if (f.carries_request || !f.icp_replies.empty()) f.bits += kIcpBits;
    transmit_now(std::move(f));
    const std::int64_t epoch = hello_epoch(now(), config_.hello_interval, n.hello_phase);
    schedule(n.hello_phase + static_cast<double>(epoch + 1) * config_.hello_interval,
             EventKind::Hello, id);
  }

  // ---- route establishment ----------------------------------------------------

  void send_rreq(NodeId tx, RreqForward forward, double delay) {
    if (forward.copies.empty()) return;
    Frame f;
    f.kind = FrameKind::Rreq;
    f.tx = tx;
    f.power = config_.p_max;
    f.bits = kRouteControlBits;
    f.copies = std::move(forward.copies);
    if (delay > 0)
      transmit_later(std::move(f), delay);
    else
      transmit_now(std::move(f));
  }

  void send_rrep(NodeId tx, RouteReply reply, double delay) {
    Frame f;
    f.kind = FrameKind::Rrep;
    f.tx = tx;
    f.power = config_.p_max;
    f.bits = kRouteControlBits;
    f.receivers = {reply.next_hop};
    f.reply = std::move(reply);
    if (delay > 0)
      transmit_later(std::move(f), delay);
    else
      transmit_now(std::move(f));
  }

  void on_route_discover(std::uint32_t flow_id) {
    FlowState& s = flows_[flow_id];
    NodeState& src = nodes_[s.flow.source];
    ++s.attempts;
    RreqForward forward = src.router.originate(s.flow.destination, src.information_table, policy_,
                                               src.neighbor_set);
    s.pending_sequence = src.router.last_sequence();
    pending_discovery_[{s.flow.source, s.pending_sequence}] = flow_id;
    trace_.records.push_back(RouteRecord{now(), flow_id, RouteEventKind::Discover, s.flow.source,
                                         s.pending_sequence, s.attempts, 0.0, {}});
    send_rreq(s.flow.source, std::move(forward), 0.0);
    discovery_contexts_.push_back({flow_id, s.pending_sequence});
    schedule(now() + config_.discovery_timeout, EventKind::DiscoveryTimeout, s.flow.source,
             discovery_contexts_.size() - 1);
  }

  void handle_rreq(NodeId rx, const RouteRequest& copy) {
    NodeState& n = nodes_[rx];
    RreqAction action = n.router.handle_rreq(copy, n.information_table, policy_, n.neighbor_set);
    if (auto* fwd = std::get_if<RreqForward>(&action)) {
      send_rreq(rx, std::move(*fwd), uniform(rng_, 0.0, kRreqJitter));
    } else if (auto* at = std::get_if<RreqAtDestination>(&action); at && at->first) {
      reply_contexts_.push_back({copy.source, copy.sequence});
      schedule(now() + config_.reply_wait, EventKind::ReplyTimer, rx, reply_contexts_.size() - 1);
    }
  }

  void on_reply_timer(NodeId dest, std::uint64_t context) {
    const ReplyContext& c = reply_contexts_.at(context);
    if (auto reply = nodes_[dest].router.make_reply(c.source, c.sequence))
      send_rrep(dest, std::move(*reply), 0.0);
  }

  void handle_rrep(NodeId rx, const RouteReply& reply) {
    RrepAction action = nodes_[rx].router.handle_rrep(reply, now());
    if (auto* fwd = std::get_if<RrepForward>(&action)) {
      send_rrep(rx, std::move(fwd->reply), uniform(rng_, 0.0, kRrepJitter));
    } else if (auto* done = std::get_if<RouteEstablished>(&action)) {
      auto it = pending_discovery_.find({rx, reply.sequence});
      if (it == pending_discovery_.end()) return;
      FlowState& s = flows_[it->second];
      pending_discovery_.erase(it);
      if (s.pending_sequence != reply.sequence) return;
      s.pending_sequence = 0;
      s.attempts = 0;
      s.flow.route = follow_route(s.flow.source, s.flow.destination);
      trace_.records.push_back(RouteRecord{now(), s.flow.id, RouteEventKind::Established, rx,
                                           reply.sequence, 0, done->entry.metric, s.flow.route});
      s.ever_established = true;
      if (!s.sending) {
        s.sending = true;
        schedule(now(), EventKind::DataSend, s.flow.source, s.flow.id);
      }
    }
  }

  std::vector<NodeId> follow_route(NodeId source, NodeId destination) const {
    std::vector<NodeId> path{source};
    NodeId at = source;
    while (at != destination && path.size() <= nodes_.size()) {
      const RoutingTableEntry* e = nodes_[at].router.routing_table().find(destination, now());
      if (e == nullptr) return {};
      at = e->next_hop;
      path.push_back(at);
    }
    return at == destination ? path : std::vector<NodeId>{};
  }

  void on_discovery_timeout(std::uint64_t context) {
    const DiscoveryContext c = discovery_contexts_.at(context);
    FlowState& s = flows_[c.flow];
    if (s.pending_sequence != c.sequence) return;  // answered
    pending_discovery_.erase({s.flow.source, c.sequence});
    s.pending_sequence = 0;
    trace_.records.push_back(RouteRecord{now(), c.flow, RouteEventKind::Timeout, s.flow.source,
                                         c.sequence, s.attempts, 0.0, {}});
    if (s.ever_established) {
      s.attempts = 0;  // keep using the old route
      return;
    }
    if (s.attempts < kDiscoveryAttempts) {
      on_route_discover(c.flow);
      return;
    }
    s.flow.failed = true;
    trace_.records.push_back(RouteRecord{now(), c.flow, RouteEventKind::Failed, s.flow.source,
                                         c.sequence, s.attempts, 0.0, {}});
  }

  // ---- data plane ---------------------------------------------------------------

  void on_data_send(std::uint32_t flow_id) {
    FlowState& s = flows_[flow_id];
    const std::uint64_t key = next_packet_key_++;
    packets_[key] = PacketState{flow_id, s.next_packet++, kInfinity, 0};
    ++s.flow.packets_sent;
    ++s.in_flight;
    forward_data(s.flow.source, key);
    schedule(now() + s.flow.send_interval, EventKind::DataSend, s.flow.source, flow_id);
  }

  void forward_data(NodeId at, std::uint64_t key) {
    const PacketState& p = packets_.at(key);
    const NodeId destination = flows_[p.flow].flow.destination;
    NodeState& n = nodes_[at];
    const RoutingTableEntry* entry = n.router.routing_table().find(destination, now());
    if (entry == nullptr) {
      packets_.at(key).min_sinr = 0.0;
      finish_packet(key, false);
      return;
    }
    const NodeId next = entry->next_hop;
    n.router.routing_table().touch(destination, now());

    Frame f;
    f.kind = FrameKind::Data;
    f.tx = at;
    f.power = config_.p_max;
    if (config_.power_adaptation) {
      if (const InfoRow* row = n.information_table.fresh_row(next)) {
        const PowerDecision d =
            adapt_power(config_.p_max, threshold_, config_.power_margin_db,
                        row->received_at_neighbor, channel_, distance(placement_[at], placement_[next]));
        f.power = d.power;
        f.marginal = d.marginal;
      }
    }
    n.tx_power = f.power;
    f.bits = config_.packet_size;
    f.receivers = {next};
    f.packet = key;
    transmit_now(std::move(f));
  }

  void finish_packet(std::uint64_t key, bool delivered) {
    auto it = packets_.find(key);
    const PacketState p = it->second;
    packets_.erase(it);
    FlowState& s = flows_[p.flow];
    --s.in_flight;
    if (delivered)
      ++s.flow.packets_delivered;
    else
      ++s.flow.packets_lost;
    const double route_sinr = p.hops == 0 ? 0.0 : p.min_sinr;
    trace_.records.push_back(PacketRecord{now(), p.flow, p.number, delivered, route_sinr, p.hops});
    s.window.push_back(route_sinr);
    while (s.window.size() > kRerouteWindow) s.window.pop_front();
    schedule(now(), EventKind::RerouteCheck, s.flow.source, p.flow);
  }

  void on_reroute_check(std::uint32_t flow_id) {
    FlowState& s = flows_[flow_id];
    if (s.pending_sequence != 0) return;
    const std::vector<double> window(s.window.begin(), s.window.end());
    if (reroute_check(window, threshold_) == RerouteDecision::Keep) return;
    while (!s.reroute_times.empty() && s.reroute_times.front() <= now() - kRerouteBudgetWindow)
      s.reroute_times.pop_front();
    if (s.reroute_times.size() >= kRerouteBudget) return;
    s.reroute_times.push_back(now());
    s.window.clear();
    trace_.records.push_back(RouteRecord{now(), flow_id, RouteEventKind::Reroute, s.flow.source, 0,
                                         0, 0.0, s.flow.route});
    s.attempts = 0;
    on_route_discover(flow_id);
  }

  // ---- wrap-up ------------------------------------------------------------------

  void finish() {
    const double end = config_.sim_duration;
    for (const FlowState& s : flows_) {
      FlowRecord r;
      r.time = end;
      r.flow = s.flow.id;
      r.source = s.flow.source;
      r.destination = s.flow.destination;
      r.sent = s.flow.packets_sent;
      r.delivered = s.flow.packets_delivered;
      r.lost = s.flow.packets_lost;
      r.in_flight = s.in_flight;
      r.failed = !s.ever_established;
      if (r.failed && end >= s.flow.start_time)
        r.missed = static_cast<std::uint64_t>(
                       std::floor((end - s.flow.start_time) / s.flow.send_interval + 1e-9)) +
                   1;
      trace_.records.push_back(r);
    }
    for (const NodeState& n : nodes_)
      trace_.records.push_back(
          NodeRecord{end, n.id, n.position.x, n.position.y, n.energy_consumed, n.tx_power});
  }

  ScenarioConfig config_;
  ChannelModel channel_;
  MetricPolicy policy_;
  double threshold_;
  Placement placement_;
  std::mt19937_64 rng_;
  double window_;

  EventQueue queue_;
  SimulationTrace trace_;
  std::vector<std::vector<NodeId>> radio_neighbors_;
  std::vector<NodeState> nodes_;
  std::vector<FlowState> flows_;

  std::unordered_map<std::uint64_t, Frame> frames_;
  std::uint64_t next_frame_id_ = 1;
  std::deque<AirFrame> air_;
  std::vector<std::deque<std::pair<double, double>>> radiated_;  // (start, energy)
  std::vector<double> radiated_sum_;
  std::vector<std::vector<InfoCollectionMessage>> pending_replies_;  // per replier

  std::unordered_map<std::uint64_t, PacketState> packets_;
  std::uint64_t next_packet_key_ = 0;

  std::map<std::pair<NodeId, std::uint64_t>, std::uint32_t> pending_discovery_;
  std::vector<DiscoveryContext> discovery_contexts_;
  std::vector<ReplyContext> reply_contexts_;
};

}  // namespace

SimulationOutcome simulate(const ScenarioConfig& config, const Scenario& scenario) {
  return Simulation(config, scenario).run();
}

SimulationTrace run(const ScenarioConfig& config, const Scenario& scenario) {
  return simulate(config, scenario).trace;
}

SimulationTrace run(const ScenarioConfig& config) { return run(config, build_scenario(config)); }

}  // namespace iacr
