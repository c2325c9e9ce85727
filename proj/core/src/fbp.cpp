#include "disinr/fbp.hpp"

#include <cmath>

#include "disinr/fft_util.hpp"
#include "disinr/threading.hpp"

namespace disinr {

Tensor fbp_reconstruct(const FanBeamGeometry& geom, const Tensor& sinogram) {
  geom.validate();
  const auto views = static_cast<std::int64_t>(geom.angles.size());
  if (views < 2) throw DomainError("fbp: need at least two views");
  if (sinogram.ndim() != 2 || sinogram.dim(0) != views || sinogram.dim(1) != geom.detectors)
    throw DimensionError("fbp: sinogram " + shape_str(sinogram.shape()) + " does not match geometry");

  const int nd = geom.detectors;
  const double d_so = geom.source_to_center_mm;
  // detector coordinates rescaled to a virtual detector through the isocenter
  const double tau = geom.detector_spacing_mm * d_so / (d_so + geom.center_to_detector_mm);

  // spatial-domain Ram-Lak kernel on the virtual detector
  const int pad = 1;
  std::int64_t conv_n = 1;
  while (conv_n < 2 * nd * pad) conv_n <<= 1;
  std::vector<std::complex<double>> kernel(static_cast<std::size_t>(conv_n), 0.0);
  for (int n = -nd + 1; n < nd; ++n) {
    double hval = 0.0;
    if (n == 0) hval = 1.0 / (4.0 * tau * tau);
    else if (n % 2 != 0) hval = -1.0 / (M_PI * M_PI * double(n) * double(n) * tau * tau);
    kernel[static_cast<std::size_t>((n + conv_n) % conv_n)] = hval;
  }
  fft_1d(kernel, false);

  // filter every view: weight, convolve, scale by tau
  Tensor filtered({views, nd});
  auto fv = filtered.data_mut();
  auto sv = sinogram.data();
  {
    std::vector<std::complex<double>> line(static_cast<std::size_t>(conv_n));
    for (std::int64_t v = 0; v < views; ++v) {
      std::fill(line.begin(), line.end(), std::complex<double>(0.0));
      for (int d = 0; d < nd; ++d) {
        const double s = (double(d) - (double(nd) - 1.0) / 2.0) * tau;
        const double weight = d_so / std::sqrt(d_so * d_so + s * s);
        line[static_cast<std::size_t>(d)] = double(sv[v * nd + d]) * weight;
      }
      fft_1d(line, false);
      for (std::int64_t k = 0; k < conv_n; ++k) line[static_cast<std::size_t>(k)] *= kernel[static_cast<std::size_t>(k)];
      fft_1d(line, true);
      // the 1/2 compensates the double coverage of each line over a full turn
      for (int d = 0; d < nd; ++d)
        fv[v * nd + d] = static_cast<real>(line[static_cast<std::size_t>(d)].real() * tau * 0.5);
    }
  }

  // weighted backprojection
  const std::int64_t h = geom.image_h, w = geom.image_w;
  const double ci = (double(h) - 1.0) / 2.0, cj = (double(w) - 1.0) / 2.0;
  const double dbeta = 2.0 * M_PI / double(views);
  Tensor img({h, w});
  auto iv = img.data_mut();
  parallel_for(h, 8, [&](std::int64_t i0, std::int64_t i1) {
    for (std::int64_t i = i0; i < i1; ++i)
      for (std::int64_t j = 0; j < w; ++j) {
        const double x = (double(j) - cj) * geom.voxel_mm;
        const double y = (double(i) - ci) * geom.voxel_mm;
        double acc = 0.0;
        for (std::int64_t v = 0; v < views; ++v) {
          const double beta = geom.angles[static_cast<std::size_t>(v)];
          const double cb = std::cos(beta), sb = std::sin(beta);
          // distance from the source plane: U*d_so is the depth of the point
          // along the central ray
          const double depth = d_so - (x * cb + y * sb);
          if (depth <= 1e-6) continue;
          const double u_ratio = depth / d_so;
          // virtual detector coordinate of the point
          const double s = (-x * sb + y * cb) * d_so / depth;
          const double pos = s / tau + (double(nd) - 1.0) / 2.0;
          const auto dlo = static_cast<std::int64_t>(std::floor(pos));
          if (dlo < 0 || dlo + 1 >= nd) continue;
          const double frac = pos - double(dlo);
          const double val = (1.0 - frac) * double(fv[v * nd + dlo]) +
                             frac * double(fv[v * nd + dlo + 1]);
          acc += val / (u_ratio * u_ratio);
        }
        iv[i * w + j] = static_cast<real>(acc * dbeta);
      }
  });
  return img;
}

}  // namespace disinr
