#include "disinr/grid.hpp"

namespace disinr {

CoordinateGrid make_grid(const Shape& extents) {
  if (extents.empty()) throw DomainError("make_grid: no extents");
  for (auto e : extents)
    if (e < 1) throw DomainError("make_grid: extent " + std::to_string(e) + " < 1");

  const int d = static_cast<int>(extents.size());
  const std::int64_t n = numel(extents);
  CoordinateGrid grid{extents, Tensor({n, d})};
  auto out = grid.coords.data_mut();
  std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
  for (std::int64_t r = 0; r < n; ++r) {
    for (int k = 0; k < d; ++k)
      out[r * d + k] = static_cast<real>((double(idx[static_cast<std::size_t>(k)]) + 0.5) /
                                         double(extents[static_cast<std::size_t>(k)]));
    for (int k = d - 1; k >= 0; --k) {
      if (++idx[static_cast<std::size_t>(k)] < extents[static_cast<std::size_t>(k)]) break;
      idx[static_cast<std::size_t>(k)] = 0;
    }
  }
  return grid;
}

}  // namespace disinr
