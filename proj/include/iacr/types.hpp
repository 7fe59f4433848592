#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace iacr {

using NodeId = std::uint32_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Two nodes share a position, or a distance is otherwise non-positive.
class GeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A derived quantity violated an internal invariant (e.g. a corrupted trace).
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A metric was requested over an empty sample.
class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed configuration text. `line()` is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline double db_to_ratio(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace iacr
