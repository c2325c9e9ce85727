#pragma once

#include "disinr/fanbeam.hpp"

namespace disinr {

// Filtered backprojection for the flat-detector fan-beam geometry: cosine
// pre-weighting, Ram-Lak filtering of each view (spatial-domain kernel applied
// by FFT convolution on the virtual detector at the isocenter), then weighted
// backprojection with the 1/U^2 fan-beam factor. A quality baseline, not a
// bit-exact inverse.
Tensor fbp_reconstruct(const FanBeamGeometry& geom, const Tensor& sinogram);

}  // namespace disinr
