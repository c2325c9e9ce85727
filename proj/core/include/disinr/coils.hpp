#pragma once

#include "disinr/tensor.hpp"

namespace disinr {

// Synthetic coil sensitivity maps [C x H x W x 2] (complex as real, imag):
// Gaussian lobes placed around the field of view, then pixelwise normalized so
// the sum over coils of |S_c|^2 is exactly 1. For C=1 the map is identically
// (1, 0).
Tensor make_coil_maps(const Shape& image_shape, int num_coils, std::uint64_t seed);

}  // namespace disinr
