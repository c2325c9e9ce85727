#include "disinr/encoding.hpp"

#include <cmath>

#include "disinr/ops.hpp"
#include "disinr/tape.hpp"
#include "disinr/threading.hpp"

namespace disinr {
namespace {

constexpr std::uint64_t kPrimes[3] = {1u, 2654435761u, 805459861u};

bool power_of_two(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

// Vertex v maps to a dense row-major index when the level's vertex grid fits
// the table, else to the XOR-of-primes hash masked to the table size.
std::int64_t corner_index(const HashEncodingConfig& cfg, int d, int level, const std::int64_t* v) {
  if (cfg.level_dense(level, d)) {
    const std::int64_t res = cfg.level_resolution(level);
    std::int64_t idx = 0;
    for (int k = 0; k < d; ++k) idx = idx * (res + 1) + v[k];
    return idx;
  }
  std::uint64_t h = 0;
  for (int k = 0; k < d; ++k) h ^= static_cast<std::uint64_t>(v[k]) * kPrimes[k];
  return static_cast<std::int64_t>(h & static_cast<std::uint64_t>(cfg.table_size - 1));
}

}  // namespace

HashEncodingConfig HashEncodingConfig::paper() {
  HashEncodingConfig cfg;
  cfg.levels = 10;
  cfg.table_size = std::int64_t(1) << 18;
  cfg.features = 8;
  cfg.base_resolution = 2;
  cfg.per_level_scale = 2.0;
  return cfg;
}

HashEncodingConfig HashEncodingConfig::desk() { return {}; }

std::int64_t HashEncodingConfig::level_resolution(int level) const {
  return static_cast<std::int64_t>(
      std::floor(double(base_resolution) * std::pow(per_level_scale, level)));
}

std::int64_t HashEncodingConfig::level_entries(int level, int dims) const {
  const std::int64_t res = level_resolution(level);
  double dense = 1.0;
  for (int k = 0; k < dims; ++k) dense *= double(res + 1);
  return dense <= double(table_size) ? static_cast<std::int64_t>(dense) : table_size;
}

bool HashEncodingConfig::level_dense(int level, int dims) const {
  const std::int64_t res = level_resolution(level);
  double dense = 1.0;
  for (int k = 0; k < dims; ++k) dense *= double(res + 1);
  return dense <= double(table_size);
}

void HashEncodingConfig::validate() const {
  if (levels < 1) throw ConfigError("hash encoding: levels must be positive");
  if (features < 1) throw ConfigError("hash encoding: features must be positive");
  if (base_resolution < 1) throw ConfigError("hash encoding: base resolution must be positive");
  if (per_level_scale <= 1.0) throw ConfigError("hash encoding: per-level scale must exceed 1");
  if (!power_of_two(table_size)) throw ConfigError("hash encoding: table size must be a power of two");
}

HashTable HashTable::init(const HashEncodingConfig& cfg, int dims, Rng& rng, double init_scale) {
  cfg.validate();
  if (dims < 1 || dims > 3) throw ConfigError("hash encoding: dims must be 1..3");
  HashTable table{cfg, dims, {}};
  table.levels.reserve(static_cast<std::size_t>(cfg.levels));
  for (int l = 0; l < cfg.levels; ++l) {
    Tensor t({cfg.level_entries(l, dims), cfg.features});
    for (auto& v : t.data_mut()) v = static_cast<real>(rng.uniform(-init_scale, init_scale));
    table.levels.push_back(std::move(t));
  }
  return table;
}

std::int64_t HashTable::parameter_count() const {
  std::int64_t n = 0;
  for (const auto& t : levels) n += t.size();
  return n;
}

Tensor hash_encode(const HashTable& table, const Tensor& coords) {
  const auto& cfg = table.cfg;
  const int d = table.dims;
  if (coords.ndim() != 2 || coords.dim(1) != d)
    throw DimensionError("hash_encode: coords " + shape_str(coords.shape()) + ", expected [R x " +
                         std::to_string(d) + "]");
  if (static_cast<int>(table.levels.size()) != cfg.levels)
    throw ConfigError("hash_encode: table level count disagrees with config");
  const std::int64_t rows = coords.dim(0);
  auto cv = coords.data();
  for (std::int64_t i = 0; i < rows * d; ++i)
    if (!(cv[i] >= real(0) && cv[i] <= real(1)))
      throw DomainError("hash_encode: coordinate outside [0,1]");

  const std::int64_t fdim = cfg.feature_dim();
  const int ncorners = 1 << d;
  Tensor out({rows, fdim});
  auto ov = out.data_mut();

  auto encode_rows = [&](std::int64_t r0, std::int64_t r1) {
    std::int64_t i0[3], vert[3];
    real w[3];
    for (std::int64_t r = r0; r < r1; ++r) {
      for (int l = 0; l < cfg.levels; ++l) {
        const std::int64_t res = cfg.level_resolution(l);
        auto tv = table.levels[static_cast<std::size_t>(l)].data();
        for (int k = 0; k < d; ++k) {
          const double p = double(cv[r * d + k]) * double(res);
          double fl = std::floor(p);
          if (fl > double(res - 1)) fl = double(res - 1);
          i0[k] = static_cast<std::int64_t>(fl);
          w[k] = static_cast<real>(p - fl);
        }
        real* dst = &ov[r * fdim + std::int64_t(l) * cfg.features];
        for (int f = 0; f < cfg.features; ++f) dst[f] = real(0);
        for (int c = 0; c < ncorners; ++c) {
          real weight = real(1);
          for (int k = 0; k < d; ++k) {
            const bool hi = (c >> k) & 1;
            vert[k] = i0[k] + (hi ? 1 : 0);
            weight *= hi ? w[k] : (real(1) - w[k]);
          }
          if (weight == real(0)) continue;
          const std::int64_t idx = corner_index(cfg, d, l, vert);
          const real* entry = &tv[idx * cfg.features];
          for (int f = 0; f < cfg.features; ++f) dst[f] += weight * entry[f];
        }
      }
    }
  };
  parallel_for(rows, 256, encode_rows);

  bool connected = false;
  for (const auto& t : table.levels) connected = connected || t.grad_connected();
  if (Tape::active() != nullptr && connected) {
    out.mark_connected();
    Tensor coords_c = coords, out_c = out;
    std::vector<Tensor> levels_c = table.levels;
    HashEncodingConfig cfg_c = cfg;
    Tape::active()->record("hash_encode", [coords_c, out_c, levels_c, cfg_c, d,
                                           ncorners]() mutable {
      if (!out_c.has_grad()) return;
      const std::int64_t rows = coords_c.dim(0);
      const std::int64_t fdim = cfg_c.feature_dim();
      auto g = out_c.grad();
      auto cv = coords_c.data();
      std::int64_t i0[3], vert[3];
      real w[3];
      for (int l = 0; l < cfg_c.levels; ++l) {
        auto& level = levels_c[static_cast<std::size_t>(l)];
        if (!level.grad_connected()) continue;
        auto gt = level.grad_mut();
        const std::int64_t res = cfg_c.level_resolution(l);
        for (std::int64_t r = 0; r < rows; ++r) {
          for (int k = 0; k < d; ++k) {
            const double p = double(cv[r * d + k]) * double(res);
            double fl = std::floor(p);
            if (fl > double(res - 1)) fl = double(res - 1);
            i0[k] = static_cast<std::int64_t>(fl);
            w[k] = static_cast<real>(p - fl);
          }
          const real* gsrc = &g[r * fdim + std::int64_t(l) * cfg_c.features];
          for (int c = 0; c < ncorners; ++c) {
            real weight = real(1);
            for (int k = 0; k < d; ++k) {
              const bool hi = (c >> k) & 1;
              vert[k] = i0[k] + (hi ? 1 : 0);
              weight *= hi ? w[k] : (real(1) - w[k]);
            }
            if (weight == real(0)) continue;
            const std::int64_t idx = corner_index(cfg_c, d, l, vert);
            real* gdst = &gt[idx * cfg_c.features];
            for (int f = 0; f < cfg_c.features; ++f) gdst[f] += weight * gsrc[f];
          }
        }
      }
    });
  }
  ops::detail::check_finite("hash_encode", out);
  return out;
}

Tensor fourier_encode(const Tensor& coords, int num_freqs) {
  if (num_freqs < 1) throw ConfigError("fourier_encode: num_freqs must be positive");
  if (coords.ndim() != 2) throw DimensionError("fourier_encode: coords must be [R x d]");
  const std::int64_t rows = coords.dim(0), d = coords.dim(1);
  const std::int64_t outdim = 2 * d * num_freqs;
  Tensor out({rows, outdim});
  auto cv = coords.data();
  auto ov = out.data_mut();
  parallel_for(rows, 512, [&](std::int64_t r0, std::int64_t r1) {
    for (std::int64_t r = r0; r < r1; ++r)
      for (std::int64_t a = 0; a < d; ++a) {
        const double c = double(cv[r * d + a]);
        for (int k = 0; k < num_freqs; ++k) {
          const double arg = std::ldexp(M_PI * c, k);  // 2^k * pi * c
          const std::int64_t base = r * outdim + a * 2 * num_freqs + 2 * k;
          ov[base] = static_cast<real>(std::sin(arg));
          ov[base + 1] = static_cast<real>(std::cos(arg));
        }
      }
  });
  return out;
}

}  // namespace disinr
