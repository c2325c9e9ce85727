#include "disinr/fft_util.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

namespace disinr {

void fft_1d(std::vector<std::complex<double>>& v, bool inverse) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<std::complex<double>> out(v.size());
  if (inverse) {
    fft.inv(out, v);
    const double s = 1.0 / double(v.size());
    for (auto& c : out) c *= s;
  } else {
    fft.fwd(out, v);
  }
  v = std::move(out);
}

Tensor fft2_centered(const Tensor& img, bool inverse) {
  if (img.ndim() != 3 || img.dim(2) != 2)
    throw DimensionError("fft2_centered: expected [H x W x 2], got " + shape_str(img.shape()));
  const std::int64_t h = img.dim(0), w = img.dim(1);

  // ifftshift into double buffers
  auto pre = [](std::int64_t i, std::int64_t n) { return (i + n / 2) % n; };
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(h * w));
  auto iv = img.data();
  for (std::int64_t i = 0; i < h; ++i)
    for (std::int64_t j = 0; j < w; ++j) {
      const std::int64_t src = (pre(i, h) * w + pre(j, w)) * 2;
      buf[static_cast<std::size_t>(i * w + j)] = {double(iv[src]), double(iv[src + 1])};
    }

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<std::complex<double>> line, spectrum;

  line.resize(static_cast<std::size_t>(w));
  spectrum.resize(static_cast<std::size_t>(w));
  for (std::int64_t i = 0; i < h; ++i) {
    std::copy_n(buf.begin() + i * w, w, line.begin());
    if (inverse) fft.inv(spectrum, line);
    else fft.fwd(spectrum, line);
    std::copy_n(spectrum.begin(), w, buf.begin() + i * w);
  }
  line.resize(static_cast<std::size_t>(h));
  spectrum.resize(static_cast<std::size_t>(h));
  for (std::int64_t j = 0; j < w; ++j) {
    for (std::int64_t i = 0; i < h; ++i) line[static_cast<std::size_t>(i)] = buf[static_cast<std::size_t>(i * w + j)];
    if (inverse) fft.inv(spectrum, line);
    else fft.fwd(spectrum, line);
    for (std::int64_t i = 0; i < h; ++i) buf[static_cast<std::size_t>(i * w + j)] = spectrum[static_cast<std::size_t>(i)];
  }

  // fftshift back and apply the unitary scale; as a destination map the roll
  // by floor(n/2) is dst = (i + n/2) % n
  const double scale = 1.0 / std::sqrt(double(h) * double(w));
  auto post = [](std::int64_t i, std::int64_t n) { return (i + n / 2) % n; };
  Tensor out({h, w, 2});
  auto ov = out.data_mut();
  for (std::int64_t i = 0; i < h; ++i)
    for (std::int64_t j = 0; j < w; ++j) {
      const auto& c = buf[static_cast<std::size_t>(i * w + j)];
      const std::int64_t dst = (post(i, h) * w + post(j, w)) * 2;
      ov[dst] = static_cast<real>(c.real() * scale);
      ov[dst + 1] = static_cast<real>(c.imag() * scale);
    }
  return out;
}

}  // namespace disinr
