#pragma once

#include <vector>

#include "disinr/rng.hpp"
#include "disinr/tensor.hpp"

namespace disinr {

struct HashEncodingConfig {
  int levels = 8;
  std::int64_t table_size = 1 << 14;  // power of two
  int features = 4;
  int base_resolution = 2;
  double per_level_scale = 2.0;

  // Appendix-scale configuration: L=10, T=2^18, F=8, N_min=2, b=2.
  static HashEncodingConfig paper();
  // Small configuration for 64-128 px runs: L=8, T=2^14, F=4, N_min=2, b=2.
  static HashEncodingConfig desk();

  bool operator==(const HashEncodingConfig&) const = default;

  std::int64_t feature_dim() const { return std::int64_t(levels) * features; }
  // Cells per axis at `level`: floor(N_min * b^level).
  std::int64_t level_resolution(int level) const;
  // Stored entries: min(T, (res+1)^d); dense levels are collision-free.
  std::int64_t level_entries(int level, int dims) const;
  bool level_dense(int level, int dims) const;

  void validate() const;
};

// Trainable per-level entry arrays. Each level tensor is [entries x F].
struct HashTable {
  HashEncodingConfig cfg;
  int dims = 2;
  std::vector<Tensor> levels;

  static HashTable init(const HashEncodingConfig& cfg, int dims, Rng& rng,
                        double init_scale = 1e-4);

  std::int64_t parameter_count() const;
};

// Multi-resolution hash encoding of coords [R x d] into [R x L*F].
// Differentiable w.r.t. the table entries (gradients scatter the d-linear
// interpolation weights); coords themselves carry no gradient.
Tensor hash_encode(const HashTable& table, const Tensor& coords);

// [sin(2^k pi c), cos(2^k pi c)] for k = 0..num_freqs-1. Column layout: axis
// outer, frequency middle, sin before cos. No trainable parameters.
Tensor fourier_encode(const Tensor& coords, int num_freqs);

}  // namespace disinr
