#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "disinr/tensor.hpp"

namespace disinr {

struct GradCheckOptions {
  // Central-difference step. Defaults follow the active precision.
#ifdef DISINR_REAL64
  double step = 1e-5;
#else
  double step = 1e-3;
#endif
  // Cap on perturbed coordinates per tensor; <=0 checks every coordinate.
  std::int64_t max_coords_per_tensor = 32;
  std::uint64_t seed = 17;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::int64_t coords_checked = 0;
};

// Compares tape gradients of the scalar `f()` against central finite
// differences over the listed parameter tensors. `f` must rebuild its whole
// graph on each call and read the current parameter values. The relative
// error per coordinate is |analytic - fd| / max(1, |fd|).
GradCheckResult grad_check(const std::function<Tensor()>& f, std::vector<Tensor> params,
                           const GradCheckOptions& opts = {});

}  // namespace disinr
