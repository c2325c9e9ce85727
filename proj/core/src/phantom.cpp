#include "disinr/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "disinr/rng.hpp"
#include "disinr/threading.hpp"

namespace disinr {

PhantomFamily phantom_family_from_string(const std::string& s) {
  if (s == "shepp_logan") return PhantomFamily::SheppLogan;
  if (s == "ellipse_family") return PhantomFamily::EllipseFamily;
  throw ConfigError("unknown phantom family: " + s);
}

std::string to_string(PhantomFamily family) {
  switch (family) {
    case PhantomFamily::SheppLogan: return "shepp_logan";
    case PhantomFamily::EllipseFamily: return "ellipse_family";
  }
  throw ConfigError("invalid phantom family enum");
}

void PhantomFamilyConfig::validate() const {
  if (extents.size() != 2 || extents[0] <= 0 || extents[1] <= 0)
    throw ConfigError("phantom extents must be 2-d and positive");
  if (population <= 0) throw ConfigError("phantom population must be positive");
  if (center_jitter < 0.0 || axis_jitter < 0.0 || intensity_jitter < 0.0)
    throw ConfigError("phantom jitters must be non-negative");
  if (axis_jitter >= 1.0)
    throw ConfigError("axis jitter must stay below 1 to keep axes positive");
  if (lesion_prob < 0.0 || lesion_prob > 1.0)
    throw ConfigError("lesion probability must lie in [0,1]");
  if (lesion_min <= 0.0 || lesion_max < lesion_min)
    throw ConfigError("lesion size range is empty or degenerate");
}

std::vector<Ellipse> shepp_logan_ellipses() {
  // (cx, cy, ax, ay, angle, amplitude); amplitudes sum to [0,1] everywhere.
  return {
      {0.0, 0.0, 0.69, 0.92, 0.0, 1.0},
      {0.0, -0.0184, 0.6624, 0.874, 0.0, -0.8},
      {0.22, 0.0, 0.11, 0.31, -18.0, -0.2},
      {-0.22, 0.0, 0.16, 0.41, 18.0, -0.2},
      {0.0, 0.35, 0.21, 0.25, 0.0, 0.1},
      {0.0, 0.1, 0.046, 0.046, 0.0, 0.1},
      {0.0, -0.1, 0.046, 0.046, 0.0, 0.1},
      {-0.08, -0.605, 0.046, 0.023, 0.0, 0.1},
      {0.0, -0.606, 0.023, 0.023, 0.0, 0.1},
      {0.06, -0.605, 0.023, 0.046, 0.0, 0.1},
  };
}

std::vector<Ellipse> ellipse_family_base(std::uint64_t seed, double contrast) {
  Rng rng(sub_seed(seed, "ellipse_family_base"));
  std::vector<Ellipse> out;
  out.push_back({0.0, 0.0, 0.88, 0.74, rng.uniform(-20.0, 20.0), 0.55});
  const int interior = 4 + static_cast<int>(rng.next_below(4));  // 4..7
  for (int k = 0; k < interior; ++k) {
    Ellipse e;
    const double r = 0.55 * std::sqrt(rng.uniform(0.0, 1.0));
    const double phi = rng.uniform(0.0, 2.0 * M_PI);
    e.cx = r * std::cos(phi);
    e.cy = r * std::sin(phi);
    e.ax = rng.uniform(0.06, 0.28);
    e.ay = rng.uniform(0.06, 0.28);
    e.angle_deg = rng.uniform(0.0, 180.0);
    const double sign = rng.uniform(0.0, 1.0) < 0.35 ? -1.0 : 1.0;
    e.amplitude = sign * contrast * rng.uniform(0.08, 0.3);
    out.push_back(e);
  }
  return out;
}

Tensor rasterize(const std::vector<Ellipse>& ellipses, const Shape& extents) {
  if (extents.size() != 2 || extents[0] <= 0 || extents[1] <= 0)
    throw DomainError("rasterize expects a positive 2-d extent");
  for (const auto& e : ellipses)
    if (e.ax <= 0.0 || e.ay <= 0.0)
      throw ConfigError("ellipse semi-axes must be positive");
  const std::int64_t h = extents[0], w = extents[1];
  Tensor img = Tensor::zeros({h, w});
  auto p = img.data_mut();
  parallel_for(h, 1, [&](std::int64_t i0, std::int64_t i1) {
    for (std::int64_t i = i0; i < i1; ++i) {
      const double y = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(h);
      for (std::int64_t j = 0; j < w; ++j) {
        const double x = 2.0 * (static_cast<double>(j) + 0.5) / static_cast<double>(w) - 1.0;
        double v = 0.0;
        for (const auto& e : ellipses) {
          const double th = e.angle_deg * M_PI / 180.0;
          const double ct = std::cos(th), st = std::sin(th);
          const double dx = x - e.cx, dy = y - e.cy;
          const double u = (dx * ct + dy * st) / e.ax;
          const double t = (-dx * st + dy * ct) / e.ay;
          if (u * u + t * t <= 1.0) v += e.amplitude;
        }
        p[static_cast<std::size_t>(i * w + j)] = static_cast<real>(std::clamp(v, 0.0, 1.0));
      }
    }
  });
  return img;
}

namespace {

std::vector<Ellipse> perturb(const std::vector<Ellipse>& base,
                             const PhantomFamilyConfig& cfg, Rng& rng) {
  std::vector<Ellipse> out = base;
  for (auto& e : out) {
    e.cx += rng.uniform(-cfg.center_jitter, cfg.center_jitter);
    e.cy += rng.uniform(-cfg.center_jitter, cfg.center_jitter);
    e.ax *= 1.0 + rng.uniform(-cfg.axis_jitter, cfg.axis_jitter);
    e.ay *= 1.0 + rng.uniform(-cfg.axis_jitter, cfg.axis_jitter);
    e.amplitude *= 1.0 + rng.uniform(-cfg.intensity_jitter, cfg.intensity_jitter);
  }
  if (rng.uniform(0.0, 1.0) < cfg.lesion_prob) {
    Ellipse lesion;
    const double r = 0.45 * std::sqrt(rng.uniform(0.0, 1.0));
    const double phi = rng.uniform(0.0, 2.0 * M_PI);
    lesion.cx = r * std::cos(phi);
    lesion.cy = r * std::sin(phi);
    lesion.ax = rng.uniform(cfg.lesion_min, cfg.lesion_max);
    lesion.ay = rng.uniform(cfg.lesion_min, cfg.lesion_max);
    lesion.angle_deg = rng.uniform(0.0, 180.0);
    lesion.amplitude = 0.25;
    out.push_back(lesion);
  }
  return out;
}

}  // namespace

std::vector<Tensor> gen_family(const PhantomFamilyConfig& cfg) {
  cfg.validate();
  std::vector<Ellipse> base;
  switch (cfg.family) {
    case PhantomFamily::SheppLogan:
      base = shepp_logan_ellipses();
      break;
    case PhantomFamily::EllipseFamily:
      base = ellipse_family_base(cfg.seed, cfg.contrast);
      break;
  }
  std::vector<Tensor> subjects;
  subjects.reserve(static_cast<std::size_t>(cfg.population));
  for (int s = 0; s < cfg.population; ++s) {
    Rng rng(sub_seed(cfg.seed, "subject:" + std::to_string(s)));
    subjects.push_back(rasterize(perturb(base, cfg, rng), cfg.extents));
  }
  return subjects;
}

}  // namespace disinr
