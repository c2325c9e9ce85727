#include "disinr/fourier_op.hpp"

#include "disinr/fft_util.hpp"

namespace disinr {

FourierOperator::FourierOperator(Tensor mask, Tensor coil_maps)
    : mask_(std::move(mask)), coils_(std::move(coil_maps)) {
  if (mask_.ndim() != 2) throw DimensionError("fourier: mask must be [H x W]");
  if (coils_.ndim() != 4 || coils_.dim(3) != 2)
    throw DimensionError("fourier: coil maps must be [C x H x W x 2]");
  if (coils_.dim(1) != mask_.dim(0) || coils_.dim(2) != mask_.dim(1))
    throw DimensionError("fourier: mask " + shape_str(mask_.shape()) + " vs coil maps " +
                         shape_str(coils_.shape()));
}

Shape FourierOperator::in_shape() const { return {mask_.dim(0), mask_.dim(1), 2}; }

Shape FourierOperator::out_shape() const {
  return {coils_.dim(0), mask_.dim(0), mask_.dim(1), 2};
}

Tensor FourierOperator::apply(const Tensor& x) const {
  check_in(x);
  const std::int64_t c_count = coils_.dim(0), h = mask_.dim(0), w = mask_.dim(1);
  Tensor out({c_count, h, w, 2});
  auto ov = out.data_mut();
  auto xv = x.data();
  auto sv = coils_.data();
  auto mv = mask_.data();
  Tensor weighted({h, w, 2});
  for (std::int64_t c = 0; c < c_count; ++c) {
    auto wv = weighted.data_mut();
    for (std::int64_t p = 0; p < h * w; ++p) {
      const real xr = xv[p * 2], xi = xv[p * 2 + 1];
      const real sr = sv[(c * h * w + p) * 2], si = sv[(c * h * w + p) * 2 + 1];
      wv[p * 2] = sr * xr - si * xi;
      wv[p * 2 + 1] = sr * xi + si * xr;
    }
    Tensor k = fft2_centered(weighted, false);
    auto kv = k.data();
    for (std::int64_t p = 0; p < h * w; ++p) {
      const real m = mv[p];
      ov[(c * h * w + p) * 2] = m * kv[p * 2];
      ov[(c * h * w + p) * 2 + 1] = m * kv[p * 2 + 1];
    }
  }
  return out;
}

Tensor FourierOperator::adjoint(const Tensor& y) const {
  check_out(y);
  const std::int64_t c_count = coils_.dim(0), h = mask_.dim(0), w = mask_.dim(1);
  Tensor out = Tensor::zeros({h, w, 2});
  auto ov = out.data_mut();
  auto yv = y.data();
  auto sv = coils_.data();
  auto mv = mask_.data();
  Tensor masked({h, w, 2});
  for (std::int64_t c = 0; c < c_count; ++c) {
    auto bv = masked.data_mut();
    for (std::int64_t p = 0; p < h * w; ++p) {
      const real m = mv[p];
      bv[p * 2] = m * yv[(c * h * w + p) * 2];
      bv[p * 2 + 1] = m * yv[(c * h * w + p) * 2 + 1];
    }
    Tensor img = fft2_centered(masked, true);
    auto iv = img.data();
    for (std::int64_t p = 0; p < h * w; ++p) {
      const real sr = sv[(c * h * w + p) * 2], si = sv[(c * h * w + p) * 2 + 1];
      const real ir = iv[p * 2], ii = iv[p * 2 + 1];
      // conj(S) * img
      ov[p * 2] += sr * ir + si * ii;
      ov[p * 2 + 1] += sr * ii - si * ir;
    }
  }
  return out;
}

Tensor zero_filling(const FourierOperator& op, const Tensor& kspace) {
  return op.adjoint(kspace);
}

}  // namespace disinr
