#include "iacr/trace.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "iacr/types.hpp"

namespace iacr {

namespace {

constexpr std::string_view kMagic = "# iacr-trace 1";

std::string path_string(const std::vector<NodeId>& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(path[i]);
  }
  return out.empty() ? "-" : out;
}

struct LineReader {
  std::size_t line;
  std::vector<std::pair<std::string_view, std::string_view>> fields;

  std::string_view get(std::string_view key) const {
    for (const auto& [k, v] : fields)
      if (k == key) return v;
    throw ConfigError(line, "missing field '" + std::string(key) + "'");
  }

  double real(std::string_view key) const {
    std::string_view v = get(key);
    double out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
      throw ConfigError(line, "bad number for '" + std::string(key) + "'");
    return out;
  }

  std::uint64_t integer(std::string_view key) const { return parse_uint(get(key)); }

  std::uint64_t parse_uint(std::string_view v) const {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
      throw ConfigError(line, "bad integer '" + std::string(v) + "'");
    return out;
  }

  std::vector<NodeId> path(std::string_view key) const {
    std::string_view v = get(key);
    std::vector<NodeId> out;
    if (v == "-") return out;
    while (!v.empty()) {
      const auto dash = v.find('-');
      out.push_back(static_cast<NodeId>(parse_uint(v.substr(0, dash))));
      if (dash == std::string_view::npos) break;
      v.remove_prefix(dash + 1);
    }
    return out;
  }
};

struct Writer {
  std::ostream& out;

  void operator()(const TxRecord& r) const {
    out << fmt::format("{:.9f} tx {} frame={} bits={} power={} energy={} marginal={}\n", r.time,
                       r.node, to_string(r.frame), r.bits, r.power, r.energy, int(r.marginal));
  }
  void operator()(const HopRecord& r) const {
    out << fmt::format(
        "{:.9f} hop {} tx={} flow={} packet={} signal={} interference={} sinr={} delivered={}\n",
        r.time, r.rx, r.tx, r.flow, r.packet, r.signal, r.interference, r.sinr, int(r.delivered));
  }
  void operator()(const PacketRecord& r) const {
    out << fmt::format("{:.9f} packet {} id={} delivered={} route_sinr={} hops={}\n", r.time, r.flow,
                       r.packet, int(r.delivered), r.route_sinr, r.hops);
  }
  void operator()(const RouteRecord& r) const {
    out << fmt::format("{:.9f} route {} flow={} event={} seq={} attempt={} metric={} path={}\n",
                       r.time, r.node, r.flow, to_string(r.event), r.sequence, r.attempt, r.metric,
                       path_string(r.path));
  }
  void operator()(const FlowRecord& r) const {
    out << fmt::format(
        "{:.9f} flow {} src={} dst={} sent={} delivered={} lost={} in_flight={} missed={} "
        "failed={}\n",
        r.time, r.flow, r.source, r.destination, r.sent, r.delivered, r.lost, r.in_flight, r.missed,
        int(r.failed));
  }
  void operator()(const NodeRecord& r) const {
    out << fmt::format("{:.9f} node {} x={} y={} energy={} tx_power={}\n", r.time, r.node, r.x, r.y,
                       r.energy, r.tx_power);
  }
};

}  // namespace

std::string_view to_string(FrameKind kind) {
  switch (kind) {
    case FrameKind::Hello: return "hello";
    case FrameKind::Rreq: return "rreq";
    case FrameKind::Rrep: return "rrep";
    case FrameKind::Data: return "data";
  }
  return "?";
}

FrameKind parse_frame_kind(std::string_view text) {
  for (FrameKind k :
       {FrameKind::Hello, FrameKind::Rreq, FrameKind::Rrep, FrameKind::Data})
    if (to_string(k) == text) return k;
  throw std::invalid_argument("unknown frame kind '" + std::string(text) + "'");
}

std::string_view to_string(RouteEventKind kind) {
  switch (kind) {
    case RouteEventKind::Discover: return "discover";
    case RouteEventKind::Established: return "established";
    case RouteEventKind::Failed: return "failed";
    case RouteEventKind::Reroute: return "reroute";
    case RouteEventKind::Timeout: return "timeout";
  }
  return "?";
}

RouteEventKind parse_route_event(std::string_view text) {
  for (RouteEventKind k : {RouteEventKind::Discover, RouteEventKind::Established,
                           RouteEventKind::Failed, RouteEventKind::Reroute, RouteEventKind::Timeout})
    if (to_string(k) == text) return k;
  throw std::invalid_argument("unknown route event '" + std::string(text) + "'");
}

void write_trace(std::ostream& out, const SimulationTrace& trace) {
  const TraceHeader& h = trace.header;
  out << kMagic << '\n';
  out << fmt::format("{:.9f} header 0 nodes={} protocol={} sinr_th_db={} delta={} seed={} duration={}\n",
                     0.0, h.n_nodes, to_string(h.protocol), h.sinr_threshold_db, h.delta, h.seed,
                     h.sim_duration);
  Writer writer{out};
  for (const TraceRecord& record : trace.records) std::visit(writer, record);
}

std::string serialize_trace(const SimulationTrace& trace) {
  std::ostringstream out;
  write_trace(out, trace);
  return out.str();
}

SimulationTrace parse_trace(std::istream& in) {
  SimulationTrace trace;
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    if (line_no == 1) {
      if (raw != kMagic) throw ConfigError(line_no, "not a trace file");
      continue;
    }
    if (raw.empty()) continue;

    std::vector<std::string_view> tokens;
    std::string_view rest = raw;
    while (!rest.empty()) {
      const auto space = rest.find(' ');
      if (space != 0) tokens.push_back(rest.substr(0, space));
      if (space == std::string_view::npos) break;
      rest.remove_prefix(space + 1);
    }
    if (tokens.size() < 3) throw ConfigError(line_no, "truncated record");

    LineReader r{line_no, {}};
    for (std::size_t i = 3; i < tokens.size(); ++i) {
      const auto eq = tokens[i].find('=');
      if (eq == std::string_view::npos) throw ConfigError(line_no, "expected key=value");
      r.fields.emplace_back(tokens[i].substr(0, eq), tokens[i].substr(eq + 1));
    }
    double time = 0;
    {
      auto [ptr, ec] = std::from_chars(tokens[0].data(), tokens[0].data() + tokens[0].size(), time);
      if (ec != std::errc()) throw ConfigError(line_no, "bad timestamp");
    }
    const std::string_view kind = tokens[1];
    const std::uint64_t subject = r.parse_uint(tokens[2]);

    try {
      if (kind == "header") {
        TraceHeader& h = trace.header;
        h.n_nodes = r.integer("nodes");
        h.protocol = parse_protocol(r.get("protocol"));
        h.sinr_threshold_db = r.real("sinr_th_db");
        h.delta = r.real("delta");
        h.seed = r.integer("seed");
        h.sim_duration = r.real("duration");
        have_header = true;
      } else if (kind == "tx") {
        trace.records.push_back(TxRecord{time, static_cast<NodeId>(subject),
                                         parse_frame_kind(r.get("frame")),
                                         static_cast<std::uint32_t>(r.integer("bits")), r.real("power"),
                                         r.real("energy"), r.integer("marginal") != 0});
      } else if (kind == "hop") {
        trace.records.push_back(HopRecord{time, static_cast<NodeId>(r.integer("tx")),
                                          static_cast<NodeId>(subject),
                                          static_cast<std::uint32_t>(r.integer("flow")),
                                          r.integer("packet"), r.real("signal"),
                                          r.real("interference"), r.real("sinr"),
                                          r.integer("delivered") != 0});
      } else if (kind == "packet") {
        trace.records.push_back(PacketRecord{time, static_cast<std::uint32_t>(subject),
                                             r.integer("id"), r.integer("delivered") != 0,
                                             r.real("route_sinr"),
                                             static_cast<std::uint32_t>(r.integer("hops"))});
      } else if (kind == "route") {
        trace.records.push_back(RouteRecord{time, static_cast<std::uint32_t>(r.integer("flow")),
                                            parse_route_event(r.get("event")),
                                            static_cast<NodeId>(subject), r.integer("seq"),
                                            static_cast<std::uint32_t>(r.integer("attempt")),
                                            r.real("metric"), r.path("path")});
      } else if (kind == "flow") {
        trace.records.push_back(FlowRecord{time, static_cast<std::uint32_t>(subject),
                                           static_cast<NodeId>(r.integer("src")),
                                           static_cast<NodeId>(r.integer("dst")), r.integer("sent"),
                                           r.integer("delivered"), r.integer("lost"),
                                           r.integer("in_flight"), r.integer("missed"),
                                           r.integer("failed") != 0});
      } else if (kind == "node") {
        trace.records.push_back(NodeRecord{time, static_cast<NodeId>(subject), r.real("x"),
                                           r.real("y"), r.real("energy"), r.real("tx_power")});
      } else {
        throw ConfigError(line_no, "unknown record kind '" + std::string(kind) + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line_no, e.what());
    }
  }
  if (line_no == 0) throw ConfigError(0, "empty trace");
  if (!have_header) throw ConfigError(0, "trace has no header line");
  return trace;
}

}  // namespace iacr
