#include "iacr/sweep.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "iacr/simulator.hpp"

namespace iacr {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto at = s.find(sep);
    out.push_back(trim(s.substr(0, at)));
    if (at == std::string_view::npos) break;
    s.remove_prefix(at + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line) {
  text = trim(text);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(line, "bad number '" + std::string(text) + "'");
  return value;
}

std::string_view unbracket(std::string_view v, std::size_t line) {
  v = trim(v);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw ConfigError(line, "expected a bracketed list");
  return v.substr(1, v.size() - 2);
}

std::string fmt12(double v) { return fmt::format("{:.12g}", v); }

}  // namespace

std::string_view to_string(SweptParameter p) {
  return p == SweptParameter::NodeCount ? "n_nodes" : "sinr_threshold_db";
}

SweptParameter parse_swept_parameter(std::string_view text) {
  if (text == "n_nodes") return SweptParameter::NodeCount;
  if (text == "sinr_threshold_db") return SweptParameter::SinrThreshold;
  throw std::invalid_argument("swept parameter must be n_nodes or sinr_threshold_db");
}

void SweepSpec::validate() const {
  if (values.empty()) throw ConfigError(0, "sweep value list is empty");
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1])) throw ConfigError(0, "sweep values must strictly increase");
  if (seeds.empty()) throw ConfigError(0, "sweep needs at least one seed");
  if (protocols.empty()) throw ConfigError(0, "sweep needs at least one protocol");
  if (parameter == SweptParameter::NodeCount)
    for (double v : values)
      if (v < 2 || v != std::floor(v)) throw ConfigError(0, "node counts must be integers >= 2");
}

ScenarioConfig SweepSpec::cell_config(Protocol protocol, double value, std::uint64_t seed) const {
  ScenarioConfig c = base;
  c.protocol = protocol;
  c.seed = seed;
  if (parameter == SweptParameter::NodeCount)
    c.n_nodes = static_cast<std::size_t>(value);
  else
    c.sinr_threshold_db = value;
  if (flows_per_node > 0) {
    c.flows.clear();
    c.random_flows = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(static_cast<double>(c.n_nodes) * flows_per_node)));
  }
  return c;
}

MeanStderr mean_stderr(const std::vector<double>& values) {
  MeanStderr out;
  if (values.empty()) return out;
  double sum = 0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  out.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stderr_ = std::sqrt(ss / (n - 1)) / std::sqrt(n);
  }
  return out;
}

SweepResult run_sweep(const SweepSpec& spec, unsigned jobs) {
  spec.validate();
  struct Task {
    Protocol protocol;
    double value;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (Protocol p : spec.protocols)
    for (double v : spec.values)
      for (std::uint64_t s : spec.seeds) tasks.push_back({p, v, s});

  std::vector<std::optional<RunMetrics>> results(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      try {
        results[i] = compute_metrics(run(spec.cell_config(t.protocol, t.value, t.seed)));
      } catch (const std::exception& e) {
        errors[i] = fmt::format("{} {}={} seed={}: {}", to_string(t.protocol),
                                to_string(spec.parameter), t.value, t.seed, e.what());
      }
    }
  };
  jobs = std::max(1u, jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepResult out;
  std::size_t i = 0;
  for (Protocol p : spec.protocols) {
    for (double v : spec.values) {
      std::vector<double> thr, out_p, energy;
      for (std::size_t k = 0; k < spec.seeds.size(); ++k, ++i) {
        if (!results[i]) {
          out.failures.push_back(errors[i]);
          continue;
        }
        out.per_seed.push_back({p, v, tasks[i].seed, *results[i]});
        thr.push_back(results[i]->throughput);
        out_p.push_back(results[i]->outage);
        energy.push_back(results[i]->mean_energy);
      }
      if (thr.empty()) continue;
      const ScenarioConfig c = spec.cell_config(p, v, spec.seeds.front());
      MetricsRecord r;
      r.protocol = p;
      r.n_nodes = c.n_nodes;
      r.sinr_threshold_db = c.sinr_threshold_db;
      r.delta = c.delta;
      r.scenario_id = fmt::format("{}-n{}-th{}", to_string(p), r.n_nodes, fmt12(r.sinr_threshold_db));
      r.seeds_aggregated = thr.size();
      const MeanStderr t = mean_stderr(thr), o = mean_stderr(out_p), e = mean_stderr(energy);
      r.throughput = t.mean;
      r.throughput_stderr = t.stderr_;
      r.outage = o.mean;
      r.outage_stderr = o.stderr_;
      r.mean_energy = e.mean;
      r.energy_stderr = e.stderr_;
      out.records.push_back(r);
    }
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<MetricsRecord>& records) {
  out << kCsvHeader << '\n';
  for (const MetricsRecord& r : records) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", to_string(r.protocol), r.n_nodes,
                       fmt12(r.sinr_threshold_db), fmt12(r.delta), r.seeds_aggregated,
                       fmt12(r.throughput), fmt12(r.throughput_stderr), fmt12(r.outage),
                       fmt12(r.outage_stderr), fmt12(r.mean_energy), fmt12(r.energy_stderr));
  }
}

std::vector<MetricsRecord> parse_csv(std::istream& in) {
  std::vector<MetricsRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != kCsvHeader) throw ConfigError(1, "unexpected CSV header");
      continue;
    }
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 11) throw ConfigError(line_no, "expected 11 columns");
    MetricsRecord r;
    try {
      r.protocol = parse_protocol(cells[0]);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line_no, e.what());
    }
    r.n_nodes = parse_number<std::size_t>(cells[1], line_no);
    r.sinr_threshold_db = parse_number<double>(cells[2], line_no);
    r.delta = parse_number<double>(cells[3], line_no);
    r.seeds_aggregated = parse_number<std::size_t>(cells[4], line_no);
    r.throughput = parse_number<double>(cells[5], line_no);
    r.throughput_stderr = parse_number<double>(cells[6], line_no);
    r.outage = parse_number<double>(cells[7], line_no);
    r.outage_stderr = parse_number<double>(cells[8], line_no);
    r.mean_energy = parse_number<double>(cells[9], line_no);
    r.energy_stderr = parse_number<double>(cells[10], line_no);
    r.scenario_id = fmt::format("{}-n{}-th{}", to_string(r.protocol), r.n_nodes,
                                fmt12(r.sinr_threshold_db));
    out.push_back(r);
  }
  return out;
}

void write_per_seed_csv(std::ostream& out, const std::vector<SeedResult>& rows) {
  out << "protocol,value,seed,throughput,outage,energy_mean_j\n";
  for (const SeedResult& r : rows)
    out << fmt::format("{},{},{},{},{},{}\n", to_string(r.protocol), fmt12(r.value), r.seed,
                       r.metrics.throughput, r.metrics.outage, r.metrics.mean_energy);
}

std::string format_manifest(const SweepSpec& spec) {
  std::string out = "# sweep manifest\n";
  out += fmt::format("sweep = {}\n", to_string(spec.parameter));
  std::vector<std::string> values, seeds, protocols;
  for (double v : spec.values) values.push_back(format_double(v));
  for (auto s : spec.seeds) seeds.push_back(std::to_string(s));
  for (auto p : spec.protocols) protocols.emplace_back(to_string(p));
  out += fmt::format("values = [{}]\n", fmt::join(values, ", "));
  out += fmt::format("seeds = [{}]\n", fmt::join(seeds, ", "));
  out += fmt::format("protocols = [{}]\n", fmt::join(protocols, ", "));
  out += fmt::format("flows_per_node = {}\n", format_double(spec.flows_per_node));
  out += serialize_config(spec.base);
  return out;
}

SweepSpec parse_sweep_spec(std::string_view text) {
  SweepSpec spec;
  spec.seeds.clear();
  std::string scenario_text;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  bool have_sweep = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    const std::string_view key = eq == std::string_view::npos ? "" : trim(line.substr(0, eq));
    const std::string_view value = eq == std::string_view::npos ? "" : trim(line.substr(eq + 1));
    bool consumed = true;
    try {
      if (key == "sweep") {
        spec.parameter = parse_swept_parameter(value);
        have_sweep = true;
      } else if (key == "values") {
        spec.values.clear();
        for (auto v : split(unbracket(value, line_no), ','))
          spec.values.push_back(parse_number<double>(v, line_no));
      } else if (key == "seeds") {
        spec.seeds.clear();
        if (const auto dots = value.find(".."); dots != std::string_view::npos) {
          const auto lo = parse_number<std::uint64_t>(value.substr(0, dots), line_no);
          const auto hi = parse_number<std::uint64_t>(value.substr(dots + 2), line_no);
          for (auto s = lo; s <= hi; ++s) spec.seeds.push_back(s);
        } else {
          for (auto v : split(unbracket(value, line_no), ','))
            spec.seeds.push_back(parse_number<std::uint64_t>(v, line_no));
        }
      } else if (key == "protocols") {
        spec.protocols.clear();
        for (auto v : split(unbracket(value, line_no), ',')) spec.protocols.push_back(parse_protocol(v));
      } else if (key == "flows_per_node") {
        spec.flows_per_node = parse_number<double>(value, line_no);
      } else {
        consumed = false;
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line_no, e.what());
    }
    // Keep line numbers aligned for errors reported by the scenario parser.
    scenario_text += consumed ? std::string() : raw;
    scenario_text += '\n';
  }
  if (!have_sweep) throw ConfigError(0, "sweep file needs a 'sweep' key");
  spec.base = parse_config(scenario_text);
  spec.validate();
  return spec;
}

}  // namespace iacr
