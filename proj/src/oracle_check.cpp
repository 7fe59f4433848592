#include "iacr/oracle_check.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "iacr/discovery.hpp"
#include "iacr/scenario.hpp"

namespace iacr {

bool routes_match(double cost_a, const std::vector<NodeId>& path_a, double cost_b,
                  const std::vector<NodeId>& path_b) {
  const double scale = std::max({1e-300, std::abs(cost_a), std::abs(cost_b)});
  return std::abs(cost_a - cost_b) <= 1e-9 * scale && path_a == path_b;
}

OracleCheckReport oracle_check(std::size_t nodes, std::size_t trials, std::uint64_t seed,
                               const ScenarioConfig& base) {
  if (nodes < 2) throw ConfigError(0, "oracle check needs at least two nodes");
  const ChannelModel channel = base.channel();
  const double range = std::pow(base.p_max / channel.detection_threshold, 1.0 / channel.alpha);
  const double side = range * std::sqrt(static_cast<double>(nodes) * std::numbers::pi / 4.0);
  const MetricPolicy policies[] = {MetricPolicy::iacr(base.delta), MetricPolicy::mhc(),
                                   MetricPolicy::iaee()};

  std::mt19937_64 rng(seed);
  OracleCheckReport report;
  while (report.trials < trials) {
    const Placement placement = sample_placement(nodes, side, rng);
    const Adjacency graph = neighbor_graph(placement, channel, base.p_max);
    const auto label = components(graph);
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (NodeId a = 0; a < nodes; ++a)
      for (NodeId b = 0; b < nodes; ++b)
        if (a != b && label[a] == label[b]) pairs.emplace_back(a, b);
    if (pairs.empty()) continue;
    const auto [src, dst] = pairs[uniform_index(rng, pairs.size())];
    const auto tables = collect_static_tables(placement, channel, graph, base.p_max);
    ++report.trials;
    for (const MetricPolicy& policy : policies) {
      ++report.comparisons;
      const auto oracle = oracle_best_route(graph, tables, policy, src, dst);
      const FloodResult flood = discover_by_flooding(graph, tables, policy, src, dst);
      const bool ok = oracle && flood.route &&
                      routes_match(flood.installed_metric, flood.route->path, oracle->cost, oracle->path);
      if (ok) continue;
      ++report.mismatches;
      if (report.details.size() < 10) {
        report.details.push_back(fmt::format(
            "trial {} {} {}->{}: flood {} [{}] oracle {} [{}]", report.trials, to_string(policy.kind),
            src, dst, flood.route ? flood.installed_metric : kInfinity,
            flood.route ? fmt::format("{}", fmt::join(flood.route->path, "-")) : "none",
            oracle ? oracle->cost : kInfinity,
            oracle ? fmt::format("{}", fmt::join(oracle->path, "-")) : "none"));
      }
    }
  }
  return report;
}

}  // namespace iacr
