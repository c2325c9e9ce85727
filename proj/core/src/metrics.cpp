#include "disinr/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace disinr {
namespace {

void check_pair(const Tensor& a, const Tensor& b) {
  if (!a.defined() || !b.defined() || a.ndim() != 2 || b.ndim() != 2)
    throw DimensionError("metrics expect single-channel [H x W] images");
  if (a.shape() != b.shape())
    throw DimensionError("metric image shapes differ: " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
}

}  // namespace

double psnr(const Tensor& a, const Tensor& b, double data_range) {
  check_pair(a, b);
  if (data_range <= 0.0) throw ConfigError("psnr: data range must be positive");
  double mse = 0.0;
  auto av = a.data(), bv = b.data();
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = double(av[i]) - double(bv[i]);
    mse += d * d;
  }
  mse /= double(av.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(data_range * data_range / mse);
}

double ssim(const Tensor& a, const Tensor& b, double data_range) {
  check_pair(a, b);
  if (data_range <= 0.0) throw ConfigError("ssim: data range must be positive");
  const std::int64_t h = a.dim(0), w = a.dim(1);
  constexpr int kWin = 11;
  if (h < kWin || w < kWin)
    throw DomainError("ssim: image smaller than the 11x11 window");

  double kernel[kWin][kWin];
  {
    const double sigma = 1.5;
    double sum = 0.0;
    for (int u = 0; u < kWin; ++u)
      for (int v = 0; v < kWin; ++v) {
        const double du = double(u - kWin / 2), dv = double(v - kWin / 2);
        kernel[u][v] = std::exp(-(du * du + dv * dv) / (2.0 * sigma * sigma));
        sum += kernel[u][v];
      }
    for (int u = 0; u < kWin; ++u)
      for (int v = 0; v < kWin; ++v) kernel[u][v] /= sum;
  }

  const double c1 = (0.01 * data_range) * (0.01 * data_range);
  const double c2 = (0.03 * data_range) * (0.03 * data_range);
  auto av = a.data(), bv = b.data();

  double total = 0.0;
  std::int64_t windows = 0;
  for (std::int64_t i = 0; i + kWin <= h; ++i)
    for (std::int64_t j = 0; j + kWin <= w; ++j) {
      double mx = 0.0, my = 0.0;
      for (int u = 0; u < kWin; ++u)
        for (int v = 0; v < kWin; ++v) {
          const std::size_t at = static_cast<std::size_t>((i + u) * w + (j + v));
          mx += kernel[u][v] * double(av[at]);
          my += kernel[u][v] * double(bv[at]);
        }
      double sxx = 0.0, syy = 0.0, sxy = 0.0;
      for (int u = 0; u < kWin; ++u)
        for (int v = 0; v < kWin; ++v) {
          const std::size_t at = static_cast<std::size_t>((i + u) * w + (j + v));
          const double dx = double(av[at]) - mx, dy = double(bv[at]) - my;
          sxx += kernel[u][v] * dx * dx;
          syy += kernel[u][v] * dy * dy;
          sxy += kernel[u][v] * dx * dy;
        }
      const double num = (2.0 * mx * my + c1) * (2.0 * sxy + c2);
      const double den = (mx * mx + my * my + c1) * (sxx + syy + c2);
      total += num / den;
      ++windows;
    }
  return total / double(windows);
}

Tensor normalize_by(const Tensor& img, double reference_max) {
  if (reference_max <= 0.0) throw ConfigError("normalize_by: reference max must be positive");
  Tensor out = img.clone();
  for (auto& v : out.data_mut()) v = static_cast<real>(double(v) / reference_max);
  return out;
}

namespace {

double mean_of(const std::vector<RecordMetrics>& rs, double RecordMetrics::*field) {
  if (rs.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rs) s += r.*field;
  return s / double(rs.size());
}

double std_of(const std::vector<RecordMetrics>& rs, double RecordMetrics::*field) {
  if (rs.size() < 2) return 0.0;
  const double m = mean_of(rs, field);
  double s = 0.0;
  for (const auto& r : rs) s += (r.*field - m) * (r.*field - m);
  return std::sqrt(s / double(rs.size()));
}

}  // namespace

double MetricReport::mean_psnr() const { return mean_of(records, &RecordMetrics::psnr_db); }
double MetricReport::std_psnr() const { return std_of(records, &RecordMetrics::psnr_db); }
double MetricReport::mean_ssim() const { return mean_of(records, &RecordMetrics::ssim); }
double MetricReport::std_ssim() const { return std_of(records, &RecordMetrics::ssim); }

void MetricReport::save_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw IoError("metrics: cannot open " + path);
  os << "method,record_id,psnr_db,ssim\n";
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%.9g,%.9g\n", method.c_str(), r.record_id.c_str(),
                  r.psnr_db, r.ssim);
    os << buf;
  }
  if (!os) throw IoError("metrics: write failed: " + path);
}

}  // namespace disinr
