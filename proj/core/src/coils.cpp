#include "disinr/coils.hpp"

#include <cmath>

#include "disinr/rng.hpp"

namespace disinr {

Tensor make_coil_maps(const Shape& image_shape, int num_coils, std::uint64_t seed) {
  if (image_shape.size() != 2)
    throw DimensionError("make_coil_maps: image shape must be 2-D, got " + shape_str(image_shape));
  if (num_coils < 1) throw ConfigError("make_coil_maps: need at least one coil");
  const std::int64_t h = image_shape[0], w = image_shape[1];
  Tensor maps({num_coils, h, w, 2});
  auto mv = maps.data_mut();

  Rng rng(sub_seed(seed, "coil_maps"));
  const double cy = double(h - 1) / 2.0, cx = double(w - 1) / 2.0;
  const double ring = 0.55 * double(std::max(h, w));
  const double sigma = 0.6 * double(std::max(h, w));

  for (int c = 0; c < num_coils; ++c) {
    // lobe center on a ring around the FOV with a little seeded jitter
    const double theta = 2.0 * M_PI * double(c) / double(num_coils) + rng.uniform(-0.15, 0.15);
    const double ly = cy + ring * std::sin(theta);
    const double lx = cx + ring * std::cos(theta);
    // mild linear phase ramp; coil 0 stays real so a single coil normalizes to 1
    const double py = c == 0 ? 0.0 : rng.uniform(-1.5, 1.5) / double(h);
    const double px = c == 0 ? 0.0 : rng.uniform(-1.5, 1.5) / double(w);
    for (std::int64_t i = 0; i < h; ++i)
      for (std::int64_t j = 0; j < w; ++j) {
        const double d2 = (double(i) - ly) * (double(i) - ly) + (double(j) - lx) * (double(j) - lx);
        const double mag = 0.05 + std::exp(-d2 / (2.0 * sigma * sigma));
        const double phase = 2.0 * M_PI * (py * double(i) + px * double(j));
        const std::int64_t at = ((std::int64_t(c) * h + i) * w + j) * 2;
        mv[at] = static_cast<real>(mag * std::cos(phase));
        mv[at + 1] = static_cast<real>(mag * std::sin(phase));
      }
  }

  // pixelwise sum-of-squares normalization
  for (std::int64_t i = 0; i < h; ++i)
    for (std::int64_t j = 0; j < w; ++j) {
      double ss = 0.0;
      for (int c = 0; c < num_coils; ++c) {
        const std::int64_t at = ((std::int64_t(c) * h + i) * w + j) * 2;
        ss += double(mv[at]) * double(mv[at]) + double(mv[at + 1]) * double(mv[at + 1]);
      }
      const double inv = 1.0 / std::sqrt(ss);
      for (int c = 0; c < num_coils; ++c) {
        const std::int64_t at = ((std::int64_t(c) * h + i) * w + j) * 2;
        mv[at] = static_cast<real>(double(mv[at]) * inv);
        mv[at + 1] = static_cast<real>(double(mv[at + 1]) * inv);
      }
    }
  return maps;
}

}  // namespace disinr
