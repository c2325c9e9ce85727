#pragma once

#include <string>
#include <vector>

#include "disinr/tensor.hpp"

namespace disinr {

// One named, typed array inside a .dinr file. `kind` is restricted to the
// known section types so readers can dispatch without guessing.
struct ContainerSection {
  std::string kind;  // "image" | "sinogram" | "kspace" | "mask" | "coilmaps"
  std::string name;
  Tensor data;
};

bool is_known_section_kind(const std::string& kind);

// Layout: 8-byte magic "DINRDAT1", u32 section count, then per section
// kind, name, u32 ndim, i64 dims, raw little-endian f32 payload. Values are
// stored as 32-bit floats regardless of the build's working precision.
void save_container(const std::string& path, const std::vector<ContainerSection>& sections);
std::vector<ContainerSection> load_container(const std::string& path);

}  // namespace disinr
