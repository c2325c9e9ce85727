#include "disinr/masks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "disinr/rng.hpp"

namespace disinr {
namespace {

void check_2d(const Shape& shape) {
  if (shape.size() != 2 || shape[0] < 1 || shape[1] < 1)
    throw DimensionError("make_mask: k-space shape must be 2-D, got " + shape_str(shape));
}

Tensor cartesian_mask(const SamplingMaskConfig& cfg, std::int64_t h, std::int64_t w) {
  if (cfg.acs > h)
    throw ConfigError("make_mask: ACS of " + std::to_string(cfg.acs) + " lines exceeds the " +
                      std::to_string(h) + " available");
  Tensor mask = Tensor::zeros({h, w});
  auto mv = mask.data_mut();
  const std::int64_t acs_lo = h / 2 - cfg.acs / 2;
  const std::int64_t acs_hi = acs_lo + cfg.acs;  // [lo, hi)
  auto fill_row = [&](std::int64_t r) {
    for (std::int64_t j = 0; j < w; ++j) mv[r * w + j] = real(1);
  };
  for (std::int64_t r = acs_lo; r < acs_hi; ++r) fill_row(r);

  // the ACS block always wins; a request whose line budget is below the ACS
  // width degrades to a center-only mask with a lower realized acceleration
  const auto target = static_cast<std::int64_t>(std::llround(double(h) / cfg.af));
  const std::int64_t outer_needed = target - cfg.acs;
  if (outer_needed > 0) {
    std::vector<std::int64_t> outer;
    for (std::int64_t r = 0; r < h; ++r)
      if (r < acs_lo || r >= acs_hi) outer.push_back(r);
    // even spacing over the outer region
    const double step = double(outer.size()) / double(outer_needed);
    for (std::int64_t k = 0; k < outer_needed; ++k) {
      const auto pick = static_cast<std::size_t>(double(k) * step);
      fill_row(outer[std::min(pick, outer.size() - 1)]);
    }
  }
  return mask;
}

void rasterize_spoke(std::span<real> mv, std::int64_t h, std::int64_t w, double angle) {
  const double cx = double(w - 1) / 2.0, cy = double(h - 1) / 2.0;
  const double half = 0.5 * std::hypot(double(h), double(w));
  const double dx = std::cos(angle), dy = std::sin(angle);
  for (double t = -half; t <= half; t += 0.5) {
    const auto j = static_cast<std::int64_t>(std::llround(cx + t * dx));
    const auto i = static_cast<std::int64_t>(std::llround(cy + t * dy));
    if (i >= 0 && i < h && j >= 0 && j < w) mv[i * w + j] = real(1);
  }
}

Tensor radial_mask(const SamplingMaskConfig& cfg, std::int64_t h, std::int64_t w) {
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  const double total = double(h * w);
  Tensor mask = Tensor::zeros({h, w});
  auto mv = mask.data_mut();
  double best_gap = std::abs(realized_af(mask) - cfg.af);  // inf at zero spokes
  std::int64_t covered = 0;
  Tensor best = mask.clone();
  // spokes only densify the mask, so realized AF falls monotonically; keep the
  // count whose AF lands closest to the request
  const int max_spokes = static_cast<int>(2 * (h + w));
  for (int s = 0; s < max_spokes; ++s) {
    rasterize_spoke(mv, h, w, double(s) * golden);
    covered = 0;
    for (real v : mask.data()) covered += v != real(0);
    const double af = total / double(covered);
    const double gap = std::abs(af - cfg.af);
    if (gap < best_gap) {
      best_gap = gap;
      best = mask.clone();
    }
    if (af <= cfg.af) break;
  }
  return best;
}

Tensor poisson_mask(const SamplingMaskConfig& cfg, std::int64_t h, std::int64_t w) {
  const double target_frac = 1.0 / cfg.af;
  const double cx = double(w - 1) / 2.0, cy = double(h - 1) / 2.0;
  const double rmax = 0.5 * std::hypot(double(h), double(w));
  const double center_r = 0.5 * double(std::min<std::int64_t>(cfg.acs, std::min(h, w)));

  // dart throwing with a minimum distance that grows away from the center;
  // `scale` controls overall density and is bisected toward the target
  // fraction. Buckets keep the neighbor test near-constant time.
  const double cell = 2.0;
  const auto gh = static_cast<std::int64_t>(std::ceil(double(h) / cell));
  const auto gw = static_cast<std::int64_t>(std::ceil(double(w) / cell));
  auto run = [&](double scale) {
    Tensor mask = Tensor::zeros({h, w});
    auto mv = mask.data_mut();
    for (std::int64_t i = 0; i < h; ++i)
      for (std::int64_t j = 0; j < w; ++j)
        if (std::hypot(double(i) - cy, double(j) - cx) <= center_r) mv[i * w + j] = real(1);
    Rng rng(sub_seed(cfg.seed, "poisson"));
    const auto darts = static_cast<std::int64_t>(20.0 * double(h * w) / std::max(1.0, cfg.af));
    std::vector<std::vector<std::pair<double, double>>> buckets(
        static_cast<std::size_t>(gh * gw));
    for (std::int64_t k = 0; k < darts; ++k) {
      const double y = rng.uniform(0.0, double(h));
      const double x = rng.uniform(0.0, double(w));
      const double r = std::hypot(y - cy - 0.5, x - cx - 0.5);
      const double local = scale * (0.5 + 2.5 * r / rmax);
      const auto by = static_cast<std::int64_t>(y / cell);
      const auto bx = static_cast<std::int64_t>(x / cell);
      const auto reach = static_cast<std::int64_t>(std::ceil(local / cell));
      bool ok = true;
      for (std::int64_t bi = std::max<std::int64_t>(0, by - reach);
           ok && bi <= std::min(gh - 1, by + reach); ++bi)
        for (std::int64_t bj = std::max<std::int64_t>(0, bx - reach);
             ok && bj <= std::min(gw - 1, bx + reach); ++bj)
          for (const auto& p : buckets[static_cast<std::size_t>(bi * gw + bj)])
            if (std::hypot(p.first - y, p.second - x) < local) {
              ok = false;
              break;
            }
      if (!ok) continue;
      buckets[static_cast<std::size_t>(by * gw + bx)].emplace_back(y, x);
      const auto i = static_cast<std::int64_t>(y);
      const auto j = static_cast<std::int64_t>(x);
      if (i >= 0 && i < h && j >= 0 && j < w) mv[i * w + j] = real(1);
    }
    return mask;
  };

  double lo = 0.2, hi = 10.0;
  Tensor best = run(1.0);
  double best_gap = std::abs(realized_af(best) - cfg.af);
  for (int iter = 0; iter < 10; ++iter) {
    const double mid = 0.5 * (lo + hi);
    Tensor m = run(mid);
    const double frac = 1.0 / realized_af(m);
    const double gap = std::abs(realized_af(m) - cfg.af);
    if (gap < best_gap) {
      best_gap = gap;
      best = m;
    }
    if (frac > target_frac) lo = mid;  // too dense -> larger radii
    else hi = mid;
  }
  return best;
}

}  // namespace

MaskPattern mask_pattern_from_string(const std::string& s) {
  if (s == "cartesian") return MaskPattern::Cartesian1D;
  if (s == "radial") return MaskPattern::Radial;
  if (s == "poisson") return MaskPattern::Poisson;
  throw ConfigError("unknown mask pattern: " + s);
}

std::string to_string(MaskPattern pattern) {
  switch (pattern) {
    case MaskPattern::Cartesian1D: return "cartesian";
    case MaskPattern::Radial: return "radial";
    case MaskPattern::Poisson: return "poisson";
  }
  throw ConfigError("unknown mask pattern");
}

Tensor make_mask(const SamplingMaskConfig& cfg, const Shape& kspace_shape) {
  check_2d(kspace_shape);
  if (cfg.af < 1.0) throw ConfigError("make_mask: acceleration factor must be >= 1");
  if (cfg.acs < 0) throw ConfigError("make_mask: negative ACS width");
  const std::int64_t h = kspace_shape[0], w = kspace_shape[1];
  if (cfg.af == 1.0) return Tensor::full({h, w}, real(1));
  switch (cfg.pattern) {
    case MaskPattern::Cartesian1D: return cartesian_mask(cfg, h, w);
    case MaskPattern::Radial: return radial_mask(cfg, h, w);
    case MaskPattern::Poisson: return poisson_mask(cfg, h, w);
  }
  throw ConfigError("unknown mask pattern");
}

double realized_af(const Tensor& mask) {
  std::int64_t on = 0;
  for (real v : mask.data()) on += v != real(0);
  if (on == 0) return std::numeric_limits<double>::infinity();
  return double(mask.size()) / double(on);
}

}  // namespace disinr
