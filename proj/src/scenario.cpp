#include "iacr/scenario.hpp"

#include <deque>
#include <string>

namespace iacr {

Placement sample_placement(std::size_t n, double side, std::mt19937_64& rng) {
  Placement placement;
  placement.reserve(n);
  while (placement.size() < n) {
    const Position candidate{uniform(rng, 0.0, side), uniform(rng, 0.0, side)};
    bool clear = true;
    for (const Position& p : placement)
      if (distance(p, candidate) < kMinSeparation) clear = false;
    if (clear) placement.push_back(candidate);
  }
  return placement;
}

void check_placement(const Placement& placement) {
  for (std::size_t i = 0; i < placement.size(); ++i)
    for (std::size_t j = i + 1; j < placement.size(); ++j)
      if (!(distance(placement[i], placement[j]) > 0.0))
        throw GeometryError("nodes " + std::to_string(i) + " and " + std::to_string(j) +
                            " are co-located");
}

std::vector<std::size_t> components(const std::vector<std::vector<NodeId>>& graph) {
  std::vector<std::size_t> label(graph.size(), SIZE_MAX);
  std::size_t next = 0;
  for (NodeId start = 0; start < graph.size(); ++start) {
    if (label[start] != SIZE_MAX) continue;
    std::deque<NodeId> queue{start};
    label[start] = next;
    while (!queue.empty()) {
      const NodeId at = queue.front();
      queue.pop_front();
      for (NodeId nb : graph[at]) {
        if (label[nb] != SIZE_MAX) continue;
        label[nb] = next;
        queue.push_back(nb);
      }
    }
    ++next;
  }
  return label;
}

Scenario build_scenario(const ScenarioConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  Scenario scenario;
  scenario.placement = sample_placement(config.n_nodes, config.area_side, rng);
  scenario.hello_phase.resize(config.n_nodes);
  for (double& phase : scenario.hello_phase) phase = uniform(rng, 0.0, config.hello_interval);

  if (!config.flows.empty()) {
    scenario.flows = config.flows;
    return scenario;
  }
  if (config.random_flows == 0) return scenario;

  const auto graph = neighbor_graph(scenario.placement, config.channel(), config.p_max);
  const auto label = components(graph);
  bool any_pair = false;
  for (std::size_t i = 0; i < label.size() && !any_pair; ++i)
    for (std::size_t j = i + 1; j < label.size() && !any_pair; ++j) any_pair = label[i] == label[j];
  if (!any_pair) throw GeometryError("no connected node pair to carry a flow");

  for (std::size_t f = 0; f < config.random_flows; ++f) {
    FlowSpec flow;
    do {
      flow.source = static_cast<NodeId>(uniform_index(rng, config.n_nodes));
      flow.destination = static_cast<NodeId>(uniform_index(rng, config.n_nodes));
    } while (flow.source == flow.destination || label[flow.source] != label[flow.destination]);
    flow.start = config.establishment_time + uniform(rng, 0.0, 0.5);
    scenario.flows.push_back(flow);
  }
  return scenario;
}

}  // namespace iacr
