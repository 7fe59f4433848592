#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "iacr/config.hpp"
#include "iacr/radio.hpp"

namespace iacr {

/// Minimum separation enforced between sampled nodes, in meters.
inline constexpr double kMinSeparation = 1.0;

/// Uniform double in [0, 1) from the top 53 bits; platform-independent, unlike
/// std::uniform_real_distribution.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_uniform(rng);
}

/// Uniform in [0, n).
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>(unit_uniform(rng) * static_cast<double>(n));
}

/// Uniform placement in the square, resampling any node closer than
/// kMinSeparation to an earlier one.
Placement sample_placement(std::size_t n, double side, std::mt19937_64& rng);

/// Rejects placements containing co-located pairs.
void check_placement(const Placement& placement);

/// Static inputs of one run, derived deterministically from the config seed.
struct Scenario {
  Placement placement;
  std::vector<FlowSpec> flows;
  std::vector<double> hello_phase;  // per node, in [0, hello_interval)
};

/// Samples the placement and HELLO phases. Explicit config flows are used as
/// given; otherwise `random_flows` source/destination pairs are drawn among
/// pairs connected in the neighbor graph, starting within the first half
/// second after establishment.
Scenario build_scenario(const ScenarioConfig& config);

/// Connected-component label of every node.
std::vector<std::size_t> components(const std::vector<std::vector<NodeId>>& graph);

}  // namespace iacr
