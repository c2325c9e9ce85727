#pragma once

#include <vector>

#include "disinr/operators.hpp"

namespace disinr {

// 2D fan-beam acquisition with a flat detector. The image is centered on the
// rotation axis; pixel (i, j) has physical center
//   x = (j - (W-1)/2) * voxel,  y = (i - (H-1)/2) * voxel     (mm).
// At view angle b the source sits at D_so*(cos b, sin b) and the detector line
// is perpendicular to the central ray at distance D_cd beyond the center.
struct FanBeamGeometry {
  std::int64_t image_h = 128, image_w = 128;
  double voxel_mm = 1.0;
  double source_to_center_mm = 150.0;
  double center_to_detector_mm = 150.0;
  int detectors = 180;
  double detector_spacing_mm = 2.6;
  std::vector<double> angles;  // radians, strictly increasing in [0, 2*pi)

  // 128 px, 180 detectors, scaled distances; fast enough for tests.
  static FanBeamGeometry desk(int views);
  // 256 px, 500 detectors at 2 mm, 300/300 mm distances.
  static FanBeamGeometry paper(int views);

  void validate() const;
};

// equally spaced view angles over [0, 2*pi)
std::vector<double> full_circle_angles(int views);

// Line integrals by fixed-step sampling (step = voxel/2) with bilinear
// interpolation; the adjoint scatters exactly the same weights, so the pair
// passes the dot-product test to rounding.
class FanBeamOperator final : public LinearOperator {
 public:
  explicit FanBeamOperator(FanBeamGeometry geom);

  Tensor apply(const Tensor& x) const override;
  Tensor adjoint(const Tensor& y) const override;
  Shape in_shape() const override { return {geom_.image_h, geom_.image_w}; }
  Shape out_shape() const override {
    return {static_cast<std::int64_t>(geom_.angles.size()), geom_.detectors};
  }
  std::string kind() const override { return "fanbeam"; }

  const FanBeamGeometry& geometry() const { return geom_; }

 private:
  FanBeamGeometry geom_;
};

}  // namespace disinr
