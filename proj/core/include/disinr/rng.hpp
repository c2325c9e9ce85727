#pragma once

#include <cstdint>
#include <string_view>

namespace disinr {

// Deterministic generator with explicitly specified output sequence
// (splitmix64 stream), so runs reproduce bit-for-bit across compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  // Uniform in [0,1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  // Box-Muller; consumes two uniforms per pair, caches the second draw.
  double gaussian();
  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent stream seed from a master seed and a label,
// e.g. sub_seed(seed, "mask"). Stable across runs.
std::uint64_t sub_seed(std::uint64_t master, std::string_view label);

}  // namespace disinr
