#include "disinr/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "disinr/coils.hpp"
#include "disinr/fourier_op.hpp"
#include "disinr/rng.hpp"

namespace disinr {

OperatorDescriptor OperatorDescriptor::identity(Shape image_shape) {
  OperatorDescriptor d;
  d.kind = "identity";
  d.image_shape = std::move(image_shape);
  return d;
}

OperatorDescriptor OperatorDescriptor::fanbeam(FanBeamGeometry geometry) {
  OperatorDescriptor d;
  d.kind = "fanbeam";
  d.image_shape = {geometry.image_h, geometry.image_w};
  d.geometry = std::move(geometry);
  return d;
}

OperatorDescriptor OperatorDescriptor::fourier(Shape image_shape, SamplingMaskConfig mask,
                                               int num_coils, std::uint64_t coil_seed) {
  OperatorDescriptor d;
  d.kind = "fourier";
  d.image_shape = std::move(image_shape);
  d.mask = mask;
  d.num_coils = num_coils;
  d.coil_seed = coil_seed;
  return d;
}

std::shared_ptr<const LinearOperator> OperatorDescriptor::instantiate() const {
  if (kind == "identity") return std::make_shared<IdentityOperator>(image_shape);
  if (kind == "fanbeam") return std::make_shared<FanBeamOperator>(geometry);
  if (kind == "fourier") {
    Tensor m = make_mask(mask, image_shape);
    Tensor c = make_coil_maps(image_shape, num_coils, coil_seed);
    return std::make_shared<FourierOperator>(std::move(m), std::move(c));
  }
  throw ConfigError("unknown operator kind: " + kind);
}

Tensor complexify(const Tensor& image) {
  if (image.ndim() != 2) throw DimensionError("complexify expects [H x W]");
  Shape out_shape = {image.dim(0), image.dim(1), 2};
  Tensor out = Tensor::zeros(out_shape);
  auto src = image.data();
  auto dst = out.data_mut();
  for (std::size_t i = 0; i < src.size(); ++i) dst[2 * i] = src[i];
  return out;
}

Tensor complex_magnitude(const Tensor& image) {
  if (image.ndim() != 3 || image.dim(2) != 2)
    throw DimensionError("complex_magnitude expects [H x W x 2]");
  Tensor out = Tensor::zeros({image.dim(0), image.dim(1)});
  auto src = image.data();
  auto dst = out.data_mut();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double re = src[2 * i], im = src[2 * i + 1];
    dst[i] = static_cast<real>(std::sqrt(re * re + im * im));
  }
  return out;
}

std::vector<MeasurementRecord> simulate_measurements(const std::vector<Tensor>& images,
                                                     const OperatorDescriptor& op,
                                                     double noise_sigma, std::uint64_t seed,
                                                     const std::string& id_prefix) {
  if (noise_sigma < 0.0) throw ConfigError("noise sigma must be non-negative");
  auto A = op.instantiate();
  std::vector<MeasurementRecord> records;
  records.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    MeasurementRecord rec;
    rec.id = id_prefix + std::to_string(i);
    rec.op = op;
    rec.noise_sigma = noise_sigma;
    rec.ground_truth = images[i];
    const Tensor x = op.kind == "fourier" ? complexify(images[i]) : images[i];
    rec.y = A->apply(x);
    if (noise_sigma > 0.0) {
      Rng rng(sub_seed(seed, "noise:" + rec.id));
      auto y = rec.y.data_mut();
      for (auto& v : y) v += static_cast<real>(noise_sigma * rng.gaussian());
    }
    records.push_back(std::move(rec));
  }
  return records;
}

DatasetSplit split_records(const std::vector<MeasurementRecord>& records, double frac_pretrain,
                           double frac_test_in, double frac_test_out, std::uint64_t seed) {
  if (frac_pretrain < 0.0 || frac_test_in < 0.0 || frac_test_out < 0.0)
    throw ConfigError("split fractions must be non-negative");
  if (std::abs(frac_pretrain + frac_test_in + frac_test_out - 1.0) > 1e-9)
    throw ConfigError("split fractions must sum to 1");
  const std::size_t n = records.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(sub_seed(seed, "split"));
  for (std::size_t i = n; i > 1; --i)
    std::swap(idx[i - 1], idx[rng.next_below(i)]);

  auto count = [n](double f) {
    return std::min(n, static_cast<std::size_t>(std::llround(f * static_cast<double>(n))));
  };
  std::size_t n_pre = count(frac_pretrain);
  std::size_t n_in = std::min(n - n_pre, count(frac_test_in));

  DatasetSplit out;
  for (std::size_t i = 0; i < n; ++i) {
    const MeasurementRecord& r = records[idx[i]];
    if (i < n_pre)
      out.pretrain.push_back(r);
    else if (i < n_pre + n_in)
      out.test_in.push_back(r);
    else
      out.test_out.push_back(r);
  }
  return out;
}

}  // namespace disinr
