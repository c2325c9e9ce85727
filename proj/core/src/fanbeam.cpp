#include "disinr/fanbeam.hpp"

#include <cmath>

#include "disinr/threading.hpp"

namespace disinr {

std::vector<double> full_circle_angles(int views) {
  if (views < 1) throw ConfigError("fanbeam: need at least one view");
  std::vector<double> angles(static_cast<std::size_t>(views));
  for (int v = 0; v < views; ++v) angles[static_cast<std::size_t>(v)] = 2.0 * M_PI * v / views;
  return angles;
}

FanBeamGeometry FanBeamGeometry::desk(int views) {
  FanBeamGeometry g;
  g.angles = full_circle_angles(views);
  return g;
}

FanBeamGeometry FanBeamGeometry::paper(int views) {
  FanBeamGeometry g;
  g.image_h = 256;
  g.image_w = 256;
  g.voxel_mm = 1.0;
  g.source_to_center_mm = 300.0;
  g.center_to_detector_mm = 300.0;
  g.detectors = 500;
  g.detector_spacing_mm = 2.0;
  g.angles = full_circle_angles(views);
  return g;
}

void FanBeamGeometry::validate() const {
  if (image_h < 1 || image_w < 1) throw ConfigError("fanbeam: empty image");
  if (voxel_mm <= 0 || source_to_center_mm <= 0 || center_to_detector_mm <= 0 ||
      detector_spacing_mm <= 0)
    throw ConfigError("fanbeam: distances and spacings must be positive");
  if (detectors < 1) throw ConfigError("fanbeam: need at least one detector");
  if (angles.empty()) throw ConfigError("fanbeam: no view angles");
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (angles[i] < 0.0 || angles[i] >= 2.0 * M_PI)
      throw ConfigError("fanbeam: view angle outside [0, 2*pi)");
    if (i > 0 && angles[i] <= angles[i - 1])
      throw ConfigError("fanbeam: view angles must be strictly increasing");
  }
}

FanBeamOperator::FanBeamOperator(FanBeamGeometry geom) : geom_(std::move(geom)) {
  geom_.validate();
}

namespace {

// Shared ray walk. For every sample point the four bilinear neighbors and
// weights are handed to `touch(pixel_index, weight)`; `weight` already carries
// the integration step.
template <typename Touch>
void walk_ray(const FanBeamGeometry& g, std::size_t view, int det, Touch&& touch) {
  const double beta = g.angles[view];
  const double cb = std::cos(beta), sb = std::sin(beta);
  const double sx = g.source_to_center_mm * cb, sy = g.source_to_center_mm * sb;
  // flat detector through (-D_cd * cos, -D_cd * sin), tangent (-sin, cos)
  const double u = (double(det) - (double(g.detectors) - 1.0) / 2.0) * g.detector_spacing_mm;
  const double dxp = -g.center_to_detector_mm * cb - u * sb;
  const double dyp = -g.center_to_detector_mm * sb + u * cb;

  double rx = dxp - sx, ry = dyp - sy;
  const double len = std::hypot(rx, ry);
  rx /= len;
  ry /= len;

  // clip the march to the image bounding circle to skip empty space
  const double half_w = 0.5 * double(g.image_w) * g.voxel_mm;
  const double half_h = 0.5 * double(g.image_h) * g.voxel_mm;
  const double bound = std::hypot(half_w, half_h);
  // closest approach of the ray to the origin
  const double tmid = -(sx * rx + sy * ry);
  const double dmin2 = (sx + tmid * rx) * (sx + tmid * rx) + (sy + tmid * ry) * (sy + tmid * ry);
  if (dmin2 >= bound * bound) return;
  const double reach = std::sqrt(bound * bound - dmin2);
  const double step = 0.5 * g.voxel_mm;
  const double t0 = std::max(0.0, tmid - reach);
  const double t1 = std::min(len, tmid + reach);

  const double inv_voxel = 1.0 / g.voxel_mm;
  const double ci = (double(g.image_h) - 1.0) / 2.0;
  const double cj = (double(g.image_w) - 1.0) / 2.0;
  for (double t = t0; t <= t1; t += step) {
    const double px = sx + t * rx, py = sy + t * ry;
    // fractional pixel coordinates
    const double fi = py * inv_voxel + ci;
    const double fj = px * inv_voxel + cj;
    const auto i0 = static_cast<std::int64_t>(std::floor(fi));
    const auto j0 = static_cast<std::int64_t>(std::floor(fj));
    const double wi = fi - double(i0), wj = fj - double(j0);
    for (int di = 0; di < 2; ++di)
      for (int dj = 0; dj < 2; ++dj) {
        const std::int64_t i = i0 + di, j = j0 + dj;
        if (i < 0 || i >= g.image_h || j < 0 || j >= g.image_w) continue;
        const double wgt = (di ? wi : 1.0 - wi) * (dj ? wj : 1.0 - wj);
        if (wgt != 0.0) touch(i * g.image_w + j, wgt * step);
      }
  }
}

}  // namespace

Tensor FanBeamOperator::apply(const Tensor& x) const {
  check_in(x);
  const auto views = static_cast<std::int64_t>(geom_.angles.size());
  Tensor sino({views, geom_.detectors});
  auto xv = x.data();
  auto sv = sino.data_mut();
  parallel_for(views, 4, [&](std::int64_t v0, std::int64_t v1) {
    for (std::int64_t v = v0; v < v1; ++v)
      for (int d = 0; d < geom_.detectors; ++d) {
        double acc = 0.0;
        walk_ray(geom_, static_cast<std::size_t>(v), d,
                 [&](std::int64_t pix, double wgt) { acc += double(xv[pix]) * wgt; });
        sv[v * geom_.detectors + d] = static_cast<real>(acc);
      }
  });
  return sino;
}

Tensor FanBeamOperator::adjoint(const Tensor& y) const {
  check_out(y);
  const auto views = static_cast<std::int64_t>(geom_.angles.size());
  const std::int64_t npix = geom_.image_h * geom_.image_w;
  auto yv = y.data();

  // parallel over view chunks into per-chunk buffers, then a fixed-order
  // reduction keeps the result independent of scheduling
  const std::int64_t grain = 4;
  const std::int64_t nchunks = (views + grain - 1) / grain;
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(nchunks));
  parallel_for(views, grain, [&](std::int64_t v0, std::int64_t v1) {
    auto& buf = partial[static_cast<std::size_t>(v0 / grain)];
    buf.assign(static_cast<std::size_t>(npix), 0.0);
    for (std::int64_t v = v0; v < v1; ++v)
      for (int d = 0; d < geom_.detectors; ++d) {
        const double val = double(yv[v * geom_.detectors + d]);
        if (val == 0.0) continue;
        walk_ray(geom_, static_cast<std::size_t>(v), d,
                 [&](std::int64_t pix, double wgt) { buf[static_cast<std::size_t>(pix)] += val * wgt; });
      }
  });
  std::vector<double> total(static_cast<std::size_t>(npix), 0.0);
  for (const auto& buf : partial) {
    if (buf.empty()) continue;
    for (std::int64_t p = 0; p < npix; ++p) total[static_cast<std::size_t>(p)] += buf[static_cast<std::size_t>(p)];
  }
  Tensor img({geom_.image_h, geom_.image_w});
  auto iv = img.data_mut();
  for (std::int64_t p = 0; p < npix; ++p) iv[p] = static_cast<real>(total[static_cast<std::size_t>(p)]);
  return img;
}

}  // namespace disinr
