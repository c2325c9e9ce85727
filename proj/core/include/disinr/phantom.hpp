#pragma once

#include <vector>

#include "disinr/tensor.hpp"

namespace disinr {

// Ellipse in the normalized frame [-1,1]^2, y up; `amplitude` adds to every
// covered pixel.
struct Ellipse {
  double cx = 0.0, cy = 0.0;
  double ax = 0.5, ay = 0.5;      // semi-axes
  double angle_deg = 0.0;
  double amplitude = 1.0;
};

enum class PhantomFamily { SheppLogan, EllipseFamily };

PhantomFamily phantom_family_from_string(const std::string& s);
std::string to_string(PhantomFamily family);

struct PhantomFamilyConfig {
  PhantomFamily family = PhantomFamily::SheppLogan;
  Shape extents = {64, 64};
  int population = 1;
  double center_jitter = 0.01;     // absolute, in normalized units
  double axis_jitter = 0.02;      // relative
  double intensity_jitter = 0.05; // relative
  double lesion_prob = 0.0;
  double lesion_min = 0.03, lesion_max = 0.08;  // lesion semi-axis range
  double contrast = 1.0;  // scales interior amplitudes (EllipseFamily)
  std::uint64_t seed = 0;

  bool operator==(const PhantomFamilyConfig&) const = default;

  void validate() const;
};

// Standard head phantom ellipse set (the soft-contrast variant).
std::vector<Ellipse> shepp_logan_ellipses();

// Seeded random base layout: one body ellipse plus a handful of interior
// structures; different seeds give structurally different families.
std::vector<Ellipse> ellipse_family_base(std::uint64_t seed, double contrast);

// Additive rasterization at pixel centers, clipped to [0,1].
Tensor rasterize(const std::vector<Ellipse>& ellipses, const Shape& extents);

// Population of `population` subjects: shared base layout, per-subject
// jitters, optional single bright lesion. Deterministic in cfg.
std::vector<Tensor> gen_family(const PhantomFamilyConfig& cfg);

}  // namespace disinr
