#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iacr/config.hpp"

namespace iacr {

struct OracleCheckReport {
  std::size_t trials = 0;
  std::size_t comparisons = 0;  // one per (trial, policy)
  std::size_t mismatches = 0;
  std::vector<std::string> details;  // first few mismatches
};

/// Compares flooded routes against oracle_best_route for IACR, MHC and IAEE
/// over `trials` random placements of `nodes` nodes. The area is shrunk so
/// the mean neighbor count is about four; each trial uses one connected pair.
OracleCheckReport oracle_check(std::size_t nodes, std::size_t trials, std::uint64_t seed,
                               const ScenarioConfig& base = {});

/// Same cost within a relative 1e-9, identical paths.
bool routes_match(double cost_a, const std::vector<NodeId>& path_a, double cost_b,
                  const std::vector<NodeId>& path_b);

}  // namespace iacr
