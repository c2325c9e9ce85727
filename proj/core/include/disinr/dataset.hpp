#pragma once

#include <memory>
#include <string>
#include <vector>

#include "disinr/fanbeam.hpp"
#include "disinr/masks.hpp"
#include "disinr/operators.hpp"

namespace disinr {

// Everything needed to rebuild a forward operator deterministically, so
// records stay self-describing after serialization.
struct OperatorDescriptor {
  std::string kind;  // "identity" | "fanbeam" | "fourier"
  Shape image_shape;               // [H, W]
  FanBeamGeometry geometry;        // fanbeam only
  SamplingMaskConfig mask;         // fourier only
  int num_coils = 1;               // fourier only
  std::uint64_t coil_seed = 0;     // fourier only

  static OperatorDescriptor identity(Shape image_shape);
  static OperatorDescriptor fanbeam(FanBeamGeometry geometry);
  static OperatorDescriptor fourier(Shape image_shape, SamplingMaskConfig mask,
                                    int num_coils, std::uint64_t coil_seed);

  std::shared_ptr<const LinearOperator> instantiate() const;
};

struct MeasurementRecord {
  std::string id;
  Tensor y;
  OperatorDescriptor op;
  double noise_sigma = 0.0;
  Tensor ground_truth;  // may be undefined for blind records
};

// Real [H x W] image to the [H x W x 2] complex layout with zero imaginary
// part (the Fourier operator's input domain).
Tensor complexify(const Tensor& image);
// Pointwise magnitude of an [H x W x 2] tensor.
Tensor complex_magnitude(const Tensor& image);

// y = A x + sigma * n with standard normal n, one independent noise stream
// per record. sigma = 0 reproduces A x exactly.
std::vector<MeasurementRecord> simulate_measurements(const std::vector<Tensor>& images,
                                                     const OperatorDescriptor& op,
                                                     double noise_sigma, std::uint64_t seed,
                                                     const std::string& id_prefix = "s");

struct DatasetSplit {
  std::vector<MeasurementRecord> pretrain;
  std::vector<MeasurementRecord> test_in;
  std::vector<MeasurementRecord> test_out;
};

// Seeded shuffle, then contiguous cuts by the rounded fractions; the three
// groups are disjoint and cover the input. Fractions must sum to 1.
DatasetSplit split_records(const std::vector<MeasurementRecord>& records, double frac_pretrain,
                           double frac_test_in, double frac_test_out, std::uint64_t seed);

}  // namespace disinr
