#pragma once

#include <string>
#include <vector>

#include "disinr/tensor.hpp"

namespace disinr {

// 10 log10(range^2 / MSE) over [H x W] images; identical inputs return the
// +infinity sentinel.
double psnr(const Tensor& a, const Tensor& b, double data_range = 1.0);

// Mean local SSIM over all fully contained 11x11 Gaussian windows
// (sigma 1.5, K1 0.01, K2 0.03). Inputs must be at least 11x11.
double ssim(const Tensor& a, const Tensor& b, double data_range = 1.0);

// Scales an image by 1/reference_max, the metric-space normalization for
// magnitude reconstructions.
Tensor normalize_by(const Tensor& img, double reference_max);

struct RecordMetrics {
  std::string record_id;
  double psnr_db = 0.0;
  double ssim = 0.0;
};

struct MetricReport {
  std::string method;
  std::vector<RecordMetrics> records;

  double mean_psnr() const;
  double std_psnr() const;
  double mean_ssim() const;
  double std_ssim() const;

  // "method,record_id,psnr_db,ssim" rows
  void save_csv(const std::string& path) const;
};

}  // namespace disinr
