#include "disinr/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

namespace disinr {

void save_pgm(const std::string& path, const Tensor& image) {
  if (!image.defined() || image.ndim() != 2)
    throw DimensionError("save_pgm expects a defined [H x W] tensor");
  const auto src = image.data();
  double lo = src.empty() ? 0.0 : double(src[0]);
  double hi = lo;
  for (real v : src) {
    lo = std::min(lo, double(v));
    hi = std::max(hi, double(v));
  }
  const double span = hi - lo;

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("save_pgm: cannot open " + path);
  os << "P5\n" << image.dim(1) << " " << image.dim(0) << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(image.dim(1)));
  std::size_t k = 0;
  for (std::int64_t i = 0; i < image.dim(0); ++i) {
    for (auto& b : row) {
      const double t = span > 0.0 ? (double(src[k]) - lo) / span : 0.5;
      b = static_cast<unsigned char>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)));
      ++k;
    }
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!os) throw IoError("save_pgm: write failed: " + path);

  std::ofstream sc(path + ".window.txt");
  if (!sc) throw IoError("save_pgm: cannot open sidecar for " + path);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "min %.9g\nmax %.9g\n", lo, hi);
  sc << buf;
}

Tensor load_pgm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("load_pgm: cannot open " + path);
  std::string magic;
  is >> magic;
  if (magic != "P5") throw IoError("load_pgm: not a binary PGM: " + path);
  std::int64_t w = 0, h = 0, maxval = 0;
  is >> w >> h >> maxval;
  if (!is || w <= 0 || h <= 0 || maxval != 255)
    throw IoError("load_pgm: unsupported header in " + path);
  is.get();  // single whitespace after maxval
  Tensor out({h, w});
  std::vector<unsigned char> raw(static_cast<std::size_t>(w * h));
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!is) throw IoError("load_pgm: truncated pixel data in " + path);
  auto dst = out.data_mut();
  for (std::size_t i = 0; i < raw.size(); ++i) dst[i] = static_cast<real>(raw[i] / 255.0);
  return out;
}

}  // namespace disinr
