#pragma once

#include "disinr/tensor.hpp"

namespace disinr {

// Pixel-center sample locations for a regular d-dimensional grid. Row r of
// `coords` holds the normalized position of the r-th multi-index in row-major
// enumeration (last axis fastest); column k is (i_k + 0.5) / extents[k].
struct CoordinateGrid {
  Shape extents;
  Tensor coords;  // [numel(extents) x d], values in (0,1)

  int dims() const { return static_cast<int>(extents.size()); }
  std::int64_t rows() const { return coords.dim(0); }
};

CoordinateGrid make_grid(const Shape& extents);

}  // namespace disinr
