#pragma once

#include <string>

#include "disinr/tensor.hpp"

namespace disinr {

enum class MaskPattern { Cartesian1D, Radial, Poisson };

MaskPattern mask_pattern_from_string(const std::string& s);
std::string to_string(MaskPattern pattern);

struct SamplingMaskConfig {
  MaskPattern pattern = MaskPattern::Cartesian1D;
  double af = 4.0;       // requested acceleration factor
  int acs = 24;          // fully sampled center width (lines or disc diameter)
  std::uint64_t seed = 0;

  bool operator==(const SamplingMaskConfig&) const = default;
};

// Binary k-space sampling mask over [H x W]. Cartesian samples whole rows
// (phase-encode lines): a centered ACS block plus evenly spaced outer lines.
// Radial rasterizes golden-angle spokes, choosing the spoke count whose
// realized acceleration is closest to the request. Poisson runs seeded
// variable-density disc sampling with a fully sampled center, bisecting the
// density scale toward the requested acceleration.
Tensor make_mask(const SamplingMaskConfig& cfg, const Shape& kspace_shape);

// Total cells / sampled cells.
double realized_af(const Tensor& mask);

}  // namespace disinr
