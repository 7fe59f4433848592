#pragma once

// Hand-rolled generators and comparison helpers shared by the test binaries.

#include <cmath>
#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "iacr/radio.hpp"
#include "iacr/scenario.hpp"

namespace iacr::testing {

inline bool close_rel(double a, double b, double rel) {
  if (a == b) return true;
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double real(double lo, double hi) { return uniform(rng, lo, hi); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform_index(rng, n)); }
  bool coin() { return index(2) == 1; }

  Placement placement(std::size_t n, double side) { return sample_placement(n, side, rng); }

  std::vector<Transmitter> transmitters(std::size_t nodes, std::size_t count) {
    std::vector<Transmitter> out;
    for (std::size_t i = 0; i < count; ++i)
      out.push_back({static_cast<NodeId>(index(nodes)), real(0.0, 1.0)});
    return out;
  }
};

// Received power written out independently of the library.
inline double path_loss(double p, const Position& a, const Position& b, double alpha) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return p / std::pow(std::sqrt(dx * dx + dy * dy), alpha);
}

}  // namespace iacr::testing

#include "iacr/trace.hpp"

namespace iacr::testing {

template <typename R>
std::vector<R> records_of(const SimulationTrace& trace) {
  std::vector<R> out;
  for (const TraceRecord& r : trace.records)
    if (const R* p = std::get_if<R>(&r)) out.push_back(*p);
  return out;
}

inline Placement placement_of(const SimulationTrace& trace) {
  Placement out(trace.header.n_nodes);
  for (const NodeRecord& n : records_of<NodeRecord>(trace)) out.at(n.node) = {n.x, n.y};
  return out;
}

struct HopAudit {
  std::size_t hops = 0;
  std::size_t budget_mismatches = 0;  // recomputed SINR disagrees with the recorded one
  std::size_t verdict_mismatches = 0;  // delivered flag disagrees with the threshold rule
};

// Rebuilds every data hop's link budget from the transmissions in the trace: the
// frame's own airtime, every other node's overlapping frames, and the positions.
inline HopAudit audit_hops(const SimulationTrace& trace, double data_rate, double alpha,
                           double noise, double rel_tol = 1e-9) {
  const Placement where = placement_of(trace);
  const auto txs = records_of<TxRecord>(trace);
  const double threshold = std::pow(10.0, trace.header.sinr_threshold_db / 10.0);
  HopAudit audit;
  for (const HopRecord& hop : records_of<HopRecord>(trace)) {
    ++audit.hops;
    const TxRecord* own = nullptr;
    for (const TxRecord& t : txs)
      if (t.node == hop.tx && t.frame == FrameKind::Data &&
          t.time + static_cast<double>(t.bits) / data_rate == hop.time)
        own = &t;
    if (own == nullptr) {
      ++audit.budget_mismatches;
      continue;
    }
    const double start = own->time, end = hop.time;
    double interference = 0;
    for (const TxRecord& t : txs) {
      if (t.node == hop.tx || t.node == hop.rx) continue;
      const double t_end = t.time + static_cast<double>(t.bits) / data_rate;
      if (t.time < end && t_end > start) interference += path_loss(t.power, where[t.node], where[hop.rx], alpha);
    }
    const double signal = path_loss(own->power, where[hop.tx], where[hop.rx], alpha);
    const double sinr = signal / (interference + noise);
    if (!close_rel(signal, hop.signal, rel_tol) || !close_rel(interference, hop.interference, rel_tol) ||
        !close_rel(sinr, hop.sinr, rel_tol))
      ++audit.budget_mismatches;
    if ((hop.sinr >= threshold) != hop.delivered) ++audit.verdict_mismatches;
  }
  return audit;
}

}  // namespace iacr::testing
