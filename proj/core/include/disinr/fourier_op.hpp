#pragma once

#include "disinr/operators.hpp"

namespace disinr {

// Undersampled multi-coil Fourier operator: per coil c,
//   y_c = mask . FFT2c(S_c . x)
// with the centered unitary transform, complex values as a trailing 2-channel
// axis. Image domain [H x W x 2], measurement domain [C x H x W x 2]. The
// adjoint sums conj(S_c) . IFFT2c(mask . y_c) over coils; with normalized
// maps and a full mask, adjoint(apply(x)) == x.
class FourierOperator final : public LinearOperator {
 public:
  FourierOperator(Tensor mask, Tensor coil_maps);

  Tensor apply(const Tensor& x) const override;
  Tensor adjoint(const Tensor& y) const override;
  Shape in_shape() const override;
  Shape out_shape() const override;
  std::string kind() const override { return "fourier"; }

  const Tensor& mask() const { return mask_; }
  const Tensor& coil_maps() const { return coils_; }
  int num_coils() const { return static_cast<int>(coils_.dim(0)); }

 private:
  Tensor mask_;   // [H x W]
  Tensor coils_;  // [C x H x W x 2]
};

// The zero-filling baseline is the adjoint applied to the measured k-space.
Tensor zero_filling(const FourierOperator& op, const Tensor& kspace);

}  // namespace disinr
