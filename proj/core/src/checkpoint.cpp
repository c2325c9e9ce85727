#include "disinr/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace disinr {
namespace {

constexpr char kMagic[8] = {'D', 'I', 'S', 'I', 'N', 'R', '0', '1'};

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

void write_i64(std::ostream& os, std::int64_t v) {
  auto u = static_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void write_str(std::ostream& os, const std::string& s) {
  write_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw IoError("checkpoint: truncated file");
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
         std::uint32_t(b[3]) << 24;
}

std::int64_t read_i64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw IoError("checkpoint: truncated file");
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= std::uint64_t(b[i]) << (8 * i);
  return static_cast<std::int64_t>(u);
}

std::string read_str(std::istream& is) {
  const std::uint32_t n = read_u32(is);
  if (n > (1u << 20)) throw IoError("checkpoint: unreasonable string length");
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) throw IoError("checkpoint: truncated file");
  return s;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string config_echo(const ModelConfig& cfg) {
  std::string s;
  s += "kind=" + to_string(cfg.kind);
  s += ";backbone=" + to_string(cfg.backbone);
  s += ";dims=" + std::to_string(cfg.dims);
  s += ";channels=" + std::to_string(cfg.channels);
  s += ";hash=" + std::to_string(cfg.hash.levels) + "," + std::to_string(cfg.hash.table_size) +
       "," + std::to_string(cfg.hash.features) + "," + std::to_string(cfg.hash.base_resolution) +
       "," + fmt_double(cfg.hash.per_level_scale);
  s += ";fourier_freqs=" + std::to_string(cfg.fourier_freqs);
  s += ";siren=" + std::to_string(cfg.siren_features) + "," + fmt_double(cfg.siren_omega);
  s += ";encoder_hidden=" + std::to_string(cfg.encoder_hidden);
  s += ";decoder_hidden=" + std::to_string(cfg.decoder_hidden);
  s += ";init_scale=" + fmt_double(cfg.init_scale);
  s += ";table_init=" + fmt_double(cfg.table_init_scale);
  return s;
}

void save_checkpoint(const std::string& path, const Model& model) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("checkpoint: cannot open for writing: " + path);
  os.write(kMagic, 8);
  write_u32(os, sizeof(real));
  write_str(os, config_echo(model.config()));
  const auto& parts = model.params().partitions();
  write_u32(os, static_cast<std::uint32_t>(parts.size()));
  for (const auto& p : parts) {
    write_str(os, p.name);
    os.put(p.frozen ? 1 : 0);
    write_u32(os, static_cast<std::uint32_t>(p.tensors.size()));
    for (const auto& t : p.tensors) {
      write_u32(os, static_cast<std::uint32_t>(t.ndim()));
      for (int k = 0; k < t.ndim(); ++k) write_i64(os, t.dim(k));
      os.write(reinterpret_cast<const char*>(t.data().data()),
               static_cast<std::streamsize>(sizeof(real) * t.data().size()));
    }
  }
  if (!os) throw IoError("checkpoint: write failed: " + path);
}

namespace {

ModelConfig config_from_echo(const std::string& echo) {
  ModelConfig cfg;
  std::size_t pos = 0;
  auto next_field = [&](const std::string& key) -> std::string {
    const std::string prefix = (pos == 0 ? "" : ";") + key + "=";
    if (echo.compare(pos, prefix.size(), prefix) != 0)
      throw IoError("checkpoint: malformed config echo near '" + key + "'");
    pos += prefix.size();
    std::size_t end = echo.find(';', pos);
    if (end == std::string::npos) end = echo.size();
    std::string v = echo.substr(pos, end - pos);
    pos = end;
    return v;
  };
  cfg.kind = model_kind_from_string(next_field("kind"));
  cfg.backbone = backbone_from_string(next_field("backbone"));
  cfg.dims = std::stoi(next_field("dims"));
  cfg.channels = std::stoi(next_field("channels"));
  {
    const std::string v = next_field("hash");
    HashEncodingConfig h;
    long long tsize = 0;
    if (std::sscanf(v.c_str(), "%d,%lld,%d,%d,%lf", &h.levels, &tsize, &h.features,
                    &h.base_resolution, &h.per_level_scale) != 5)
      throw IoError("checkpoint: malformed hash config: " + v);
    h.table_size = static_cast<std::int64_t>(tsize);
    cfg.hash = h;
  }
  cfg.fourier_freqs = std::stoi(next_field("fourier_freqs"));
  {
    const std::string v = next_field("siren");
    if (std::sscanf(v.c_str(), "%d,%lf", &cfg.siren_features, &cfg.siren_omega) != 2)
      throw IoError("checkpoint: malformed siren config: " + v);
  }
  cfg.encoder_hidden = std::stoi(next_field("encoder_hidden"));
  cfg.decoder_hidden = std::stoi(next_field("decoder_hidden"));
  cfg.init_scale = std::stod(next_field("init_scale"));
  cfg.table_init_scale = std::stod(next_field("table_init"));
  return cfg;
}

}  // namespace

Model load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("checkpoint: cannot open: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw IoError("checkpoint: bad magic in " + path);
  const std::uint32_t width = read_u32(is);
  if (width != sizeof(real))
    throw IoError("checkpoint: stored reals are " + std::to_string(width) +
                  " bytes, this build uses " + std::to_string(sizeof(real)));
  const std::string echo = read_str(is);
  const ModelConfig cfg = config_from_echo(echo);

  Model model = Model::build(cfg, 0, 0);
  const std::uint32_t nparts = read_u32(is);
  std::vector<std::string> frozen;
  for (std::uint32_t pi = 0; pi < nparts; ++pi) {
    const std::string name = read_str(is);
    const int flag = is.get();
    if (flag < 0) throw IoError("checkpoint: truncated file");
    const std::uint32_t ntensors = read_u32(is);
    if (!model.params().has(name)) {
      if (name.rfind("subject:", 0) == 0)
        model.spawn_subject(name.substr(8), 0);
      else
        throw IoError("checkpoint: unexpected partition " + name + " for " + to_string(cfg.kind));
    }
    Partition& part = model.params().get(name);
    if (part.tensors.size() != ntensors)
      throw IoError("checkpoint: partition " + name + " holds " + std::to_string(ntensors) +
                    " tensors, model expects " + std::to_string(part.tensors.size()));
    for (std::uint32_t ti = 0; ti < ntensors; ++ti) {
      const std::uint32_t ndim = read_u32(is);
      Shape shape(ndim);
      for (std::uint32_t k = 0; k < ndim; ++k) shape[k] = read_i64(is);
      Tensor& t = part.tensors[ti];
      if (t.shape() != shape)
        throw IoError("checkpoint: tensor shape " + shape_str(shape) + " in partition " + name +
                      ", model expects " + shape_str(t.shape()));
      is.read(reinterpret_cast<char*>(t.data_mut().data()),
              static_cast<std::streamsize>(sizeof(real) * t.data_mut().size()));
      if (!is) throw IoError("checkpoint: truncated tensor data");
    }
    if (flag) frozen.push_back(name);
  }
  if (!frozen.empty()) model.params().freeze(frozen);
  return model;
}

Model load_checkpoint(const std::string& path, const ModelConfig& expected) {
  Model model = load_checkpoint(path);
  if (config_echo(model.config()) != config_echo(expected))
    throw ConfigError("checkpoint config does not match the experiment: " +
                      config_echo(model.config()) + " vs " + config_echo(expected));
  return model;
}

}  // namespace disinr
