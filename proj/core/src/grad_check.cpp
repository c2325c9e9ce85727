#include "disinr/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "disinr/rng.hpp"
#include "disinr/tape.hpp"

namespace disinr {

GradCheckResult grad_check(const std::function<Tensor()>& f, std::vector<Tensor> params,
                           const GradCheckOptions& opts) {
  for (auto& p : params) p.set_requires_grad(true);

  std::vector<std::vector<real>> analytic;
  {
    Tape tape;
    Tape::Scope scope(tape);
    for (auto& p : params) p.zero_grad();
    Tensor loss = f();
    tape.backward(loss);
    for (auto& p : params) {
      auto g = p.grad();
      analytic.emplace_back(g.begin(), g.end());
    }
  }

  Rng rng(opts.seed);
  GradCheckResult result;
  const real h = static_cast<real>(opts.step);
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& p = params[pi];
    const std::int64_t n = p.size();
    std::vector<std::int64_t> coords;
    if (opts.max_coords_per_tensor > 0 && n > opts.max_coords_per_tensor) {
      for (std::int64_t k = 0; k < opts.max_coords_per_tensor; ++k)
        coords.push_back(static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(n))));
      std::sort(coords.begin(), coords.end());
      coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    } else {
      coords.resize(static_cast<std::size_t>(n));
      for (std::int64_t k = 0; k < n; ++k) coords[static_cast<std::size_t>(k)] = k;
    }
    auto data = p.data_mut();
    for (std::int64_t c : coords) {
      const real saved = data[c];
      data[c] = saved + h;
      const double fp = double(f().item());
      data[c] = saved - h;
      const double fm = double(f().item());
      data[c] = saved;
      const double fd = (fp - fm) / (2.0 * double(h));
      const double a = double(analytic[pi][static_cast<std::size_t>(c)]);
      const double rel = std::abs(a - fd) / std::max(1.0, std::abs(fd));
      result.max_rel_error = std::max(result.max_rel_error, rel);
      ++result.coords_checked;
    }
  }
  return result;
}

}  // namespace disinr
