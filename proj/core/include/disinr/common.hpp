#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace disinr {

// Storage precision is a build-wide switch; numerically sensitive reductions
// accumulate in double regardless.
#ifdef DISINR_REAL64
using real = double;
#else
using real = float;
#endif

using Shape = std::vector<std::int64_t>;

inline std::int64_t numel(const Shape& s) {
  std::int64_t n = 1;
  for (auto e : s) n *= e;
  return n;
}

std::string shape_str(const Shape& s);

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Shape disagreement between operands.
struct DimensionError : Error {
  using Error::Error;
};
// Value outside an operation's admissible domain (e.g. coords not in [0,1]).
struct DomainError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
// Non-finite values, divergence.
struct NumericalError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
// Unknown partition, subject or key.
struct LookupError : Error {
  using Error::Error;
};

// When enabled, every recorded op verifies its output is finite.
void set_finite_checks(bool on);
bool finite_checks_enabled();

}  // namespace disinr
