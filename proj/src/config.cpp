#include "iacr/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace iacr {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view text, std::size_t line) {
  text = trim(text);
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(line, "expected a number, got '" + std::string(text) + "'");
  return value;
}

std::uint64_t to_unsigned(std::string_view text, std::size_t line) {
  text = trim(text);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(line, "expected a non-negative integer, got '" + std::string(text) + "'");
  return value;
}

bool to_bool(std::string_view text, std::size_t line) {
  text = trim(text);
  if (text == "true" || text == "on" || text == "1") return true;
  if (text == "false" || text == "off" || text == "0") return false;
  throw ConfigError(line, "expected true/false, got '" + std::string(text) + "'");
}

FlowSpec parse_flow(std::string_view text, std::size_t line) {
  const auto arrow = text.find("->");
  const auto at = text.find('@');
  if (arrow == std::string_view::npos || at == std::string_view::npos || at < arrow)
    throw ConfigError(line, "flow must read 'SRC -> DST @ START', got '" + std::string(trim(text)) + "'");
  FlowSpec flow;
  flow.source = static_cast<NodeId>(to_unsigned(text.substr(0, arrow), line));
  flow.destination = static_cast<NodeId>(to_unsigned(text.substr(arrow + 2, at - arrow - 2), line));
  flow.start = to_double(text.substr(at + 1), line);
  return flow;
}

// Comma- or newline-separated entries; empty entries are skipped.
void parse_flow_entries(std::string_view body, std::size_t line, std::vector<FlowSpec>& out) {
  while (!body.empty()) {
    const auto comma = body.find(',');
    std::string_view entry = trim(body.substr(0, comma));
    if (!entry.empty()) out.push_back(parse_flow(entry, line));
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
}

using Setter = std::function<void(ScenarioConfig&, std::string_view, std::size_t)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"n_nodes", [](auto& c, auto v, auto l) { c.n_nodes = to_unsigned(v, l); }},
      {"area_side", [](auto& c, auto v, auto l) { c.area_side = to_double(v, l); }},
      {"p_max", [](auto& c, auto v, auto l) { c.p_max = to_double(v, l); }},
      {"alpha", [](auto& c, auto v, auto l) { c.alpha = to_double(v, l); }},
      {"noise_variance", [](auto& c, auto v, auto l) { c.noise_variance = to_double(v, l); }},
      {"detection_threshold",
       [](auto& c, auto v, auto l) { c.detection_threshold = to_double(v, l); }},
      {"sinr_threshold_db", [](auto& c, auto v, auto l) { c.sinr_threshold_db = to_double(v, l); }},
      {"delta", [](auto& c, auto v, auto l) { c.delta = to_double(v, l); }},
      {"protocol",
       [](auto& c, auto v, auto l) {
         try {
           c.protocol = parse_protocol(trim(v));
         } catch (const std::invalid_argument& e) {
           throw ConfigError(l, e.what());
         }
       }},
      {"created_term",
       [](auto& c, auto v, auto l) {
         v = trim(v);
         if (v == "exclude_relay")
           c.created_term = CreatedTerm::ExcludeRelay;
         else if (v == "all_neighbors")
           c.created_term = CreatedTerm::AllNeighbors;
         else
           throw ConfigError(l, "created_term must be exclude_relay or all_neighbors");
       }},
      {"sir_mode", [](auto& c, auto v, auto l) { c.sir_mode = to_bool(v, l); }},
      {"power_adaptation", [](auto& c, auto v, auto l) { c.power_adaptation = to_bool(v, l); }},
      {"power_margin_db", [](auto& c, auto v, auto l) { c.power_margin_db = to_double(v, l); }},
      {"data_rate", [](auto& c, auto v, auto l) { c.data_rate = to_double(v, l); }},
      {"packet_size",
       [](auto& c, auto v, auto l) { c.packet_size = static_cast<std::uint32_t>(to_unsigned(v, l)); }},
      {"send_interval", [](auto& c, auto v, auto l) { c.send_interval = to_double(v, l); }},
      {"hello_interval", [](auto& c, auto v, auto l) { c.hello_interval = to_double(v, l); }},
      {"establishment_time",
       [](auto& c, auto v, auto l) { c.establishment_time = to_double(v, l); }},
      {"sim_duration", [](auto& c, auto v, auto l) { c.sim_duration = to_double(v, l); }},
      {"reply_wait", [](auto& c, auto v, auto l) { c.reply_wait = to_double(v, l); }},
      {"discovery_timeout", [](auto& c, auto v, auto l) { c.discovery_timeout = to_double(v, l); }},
      {"route_lifetime", [](auto& c, auto v, auto l) { c.route_lifetime = to_double(v, l); }},
      {"random_flows", [](auto& c, auto v, auto l) { c.random_flows = to_unsigned(v, l); }},
      {"seed", [](auto& c, auto v, auto l) { c.seed = to_unsigned(v, l); }},
      {"flows",
       [](auto& c, auto v, auto l) {
         v = trim(v);
         if (v.size() < 2 || v.front() != '[' || v.back() != ']')
           throw ConfigError(l, "flows must be a bracketed list");
         c.flows.clear();
         parse_flow_entries(v.substr(1, v.size() - 2), l, c.flows);
       }},
  };
  return table;
}

void assign(ScenarioConfig& config, std::string_view key, std::string_view value, std::size_t line) {
  const auto& table = setters();
  auto it = table.find(trim(key));
  if (it == table.end()) throw ConfigError(line, "unknown key '" + std::string(trim(key)) + "'");
  it->second(config, value, line);
}

}  // namespace

ChannelModel ScenarioConfig::channel() const {
  return ChannelModel{alpha, noise_variance, detection_threshold, sir_mode};
}

MetricPolicy ScenarioConfig::policy() const {
  switch (protocol) {
    case Protocol::IACR: return MetricPolicy::iacr(delta, created_term);
    case Protocol::MHC: return MetricPolicy::mhc();
    case Protocol::IAEE: return MetricPolicy::iaee();
  }
  return MetricPolicy::mhc();
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(0, what); };
  if (n_nodes < 2) fail("n_nodes must be at least 2");
  if (!(area_side > 0)) fail("area_side must be positive");
  if (!(p_max > 0)) fail("p_max must be positive");
  try {
    channel().validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (!(delta >= 0 && delta <= 1)) fail("delta must lie in [0, 1]");
  if (!(data_rate > 0)) fail("data_rate must be positive");
  if (packet_size == 0) fail("packet_size must be positive");
  if (!(send_interval > packet_size / data_rate))
    fail("send_interval must exceed the packet airtime");
  if (!(hello_interval > 0)) fail("hello_interval must be positive");
  if (!(establishment_time >= 0 && establishment_time < sim_duration))
    fail("establishment_time must lie in [0, sim_duration)");
  if (!(reply_wait > 0 && discovery_timeout > reply_wait))
    fail("need 0 < reply_wait < discovery_timeout");
  if (!(route_lifetime > 0)) fail("route_lifetime must be positive");
  for (const FlowSpec& f : flows) {
    if (f.source >= n_nodes || f.destination >= n_nodes) fail("flow endpoint out of range");
    if (f.source == f.destination) fail("flow source equals destination");
    if (f.start < establishment_time) fail("flow starts before the establishment window ends");
  }
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig config;
  std::size_t line_no = 0;
  std::string pending_flows;
  std::size_t flows_line = 0;
  bool in_flows = false;

  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (in_flows) {
      if (!line.empty() && line.back() == ']') {
        line.remove_suffix(1);
        parse_flow_entries(line, line_no, config.flows);
        in_flows = false;
      } else {
        parse_flow_entries(line, line_no, config.flows);
      }
      continue;
    }
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key == "flows" && value == "[") {
      config.flows.clear();
      in_flows = true;
      flows_line = line_no;
      continue;
    }
    assign(config, key, value, line_no);
  }
  if (in_flows) throw ConfigError(flows_line, "unterminated flows list");
  config.validate();
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void apply_override(ScenarioConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError(0, "override must read key=value, got '" + std::string(assignment) + "'");
  assign(config, assignment.substr(0, eq), assignment.substr(eq + 1), 0);
}

std::string format_double(double value) { return fmt::format("{}", value); }

std::string serialize_config(const ScenarioConfig& c) {
  std::string out;
  auto put = [&](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  put("n_nodes", std::to_string(c.n_nodes));
  put("area_side", format_double(c.area_side));
  put("p_max", format_double(c.p_max));
  put("alpha", format_double(c.alpha));
  put("noise_variance", format_double(c.noise_variance));
  put("detection_threshold", format_double(c.detection_threshold));
  put("sinr_threshold_db", format_double(c.sinr_threshold_db));
  put("delta", format_double(c.delta));
  put("protocol", std::string(to_string(c.protocol)));
  put("created_term", c.created_term == CreatedTerm::ExcludeRelay ? "exclude_relay" : "all_neighbors");
  put("sir_mode", c.sir_mode ? "true" : "false");
  put("power_adaptation", c.power_adaptation ? "true" : "false");
  put("power_margin_db", format_double(c.power_margin_db));
  put("data_rate", format_double(c.data_rate));
  put("packet_size", std::to_string(c.packet_size));
  put("send_interval", format_double(c.send_interval));
  put("hello_interval", format_double(c.hello_interval));
  put("establishment_time", format_double(c.establishment_time));
  put("sim_duration", format_double(c.sim_duration));
  put("reply_wait", format_double(c.reply_wait));
  put("discovery_timeout", format_double(c.discovery_timeout));
  put("route_lifetime", format_double(c.route_lifetime));
  put("random_flows", std::to_string(c.random_flows));
  put("seed", std::to_string(c.seed));
  out += "flows = [\n";
  for (const FlowSpec& f : c.flows)
    out += fmt::format("  {} -> {} @ {}\n", f.source, f.destination, format_double(f.start));
  out += "]\n";
  return out;
}

}  // namespace iacr
