#include "disinr/container.hpp"

#include <array>
#include <cstring>
#include <fstream>

namespace disinr {
namespace {

constexpr char kMagic[8] = {'D', 'I', 'N', 'R', 'D', 'A', 'T', '1'};

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

void write_f32(std::ostream& os, float v) {
  std::uint32_t u;
  std::memcpy(&u, &v, 4);
  write_u32(os, u);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw IoError("container: truncated file");
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
         std::uint32_t(b[3]) << 24;
}

std::int64_t read_i64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw IoError("container: truncated file");
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= std::uint64_t(b[i]) << (8 * i);
  return static_cast<std::int64_t>(u);
}

std::string read_str(std::istream& is) {
  const std::uint32_t n = read_u32(is);
  if (n > (1u << 16)) throw IoError("container: unreasonable string length");
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) throw IoError("container: truncated file");
  return s;
}

}  // namespace

bool is_known_section_kind(const std::string& kind) {
  return kind == "image" || kind == "sinogram" || kind == "kspace" || kind == "mask" ||
         kind == "coilmaps";
}

void save_container(const std::string& path, const std::vector<ContainerSection>& sections) {
  for (const auto& s : sections) {
    if (!is_known_section_kind(s.kind))
      throw ConfigError("container: unknown section kind: " + s.kind);
    if (!s.data.defined()) throw ConfigError("container: undefined tensor in section " + s.name);
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("container: cannot open for writing: " + path);
  os.write(kMagic, 8);
  write_u32(os, static_cast<std::uint32_t>(sections.size()));
  for (const auto& s : sections) {
    write_str(os, s.kind);
    write_str(os, s.name);
    write_u32(os, static_cast<std::uint32_t>(s.data.ndim()));
    for (int a = 0; a < s.data.ndim(); ++a) write_i64(os, s.data.dim(a));
    for (real v : s.data.data()) write_f32(os, static_cast<float>(v));
  }
  if (!os) throw IoError("container: write failed: " + path);
}

std::vector<ContainerSection> load_container(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("container: cannot open: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw IoError("container: bad magic in " + path);
  const std::uint32_t count = read_u32(is);
  std::vector<ContainerSection> sections;
  sections.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    ContainerSection s;
    s.kind = read_str(is);
    s.name = read_str(is);
    if (!is_known_section_kind(s.kind))
      throw IoError("container: unknown section kind: " + s.kind);
    const std::uint32_t ndim = read_u32(is);
    if (ndim > 8) throw IoError("container: unreasonable rank");
    Shape shape(ndim);
    for (std::uint32_t a = 0; a < ndim; ++a) shape[a] = read_i64(is);
    Tensor t(shape);
    auto dst = t.data_mut();
    for (auto& v : dst) {
      const std::uint32_t u = read_u32(is);
      float f;
      std::memcpy(&f, &u, 4);
      v = static_cast<real>(f);
    }
    s.data = std::move(t);
    sections.push_back(std::move(s));
  }
  return sections;
}

}  // namespace disinr
