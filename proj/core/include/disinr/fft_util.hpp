#pragma once

#include <complex>
#include <vector>

#include "disinr/tensor.hpp"

namespace disinr {

// Unnormalized forward / 1/N inverse 1D transform, any length.
void fft_1d(std::vector<std::complex<double>>& v, bool inverse);

// Centered unitary 2D FFT of a complex image stored as [H x W x 2]
// (trailing axis = real, imag). DC sits at (H/2, W/2). The unitary scaling
// 1/sqrt(HW) per direction makes the round trip the identity.
Tensor fft2_centered(const Tensor& img, bool inverse);

}  // namespace disinr
