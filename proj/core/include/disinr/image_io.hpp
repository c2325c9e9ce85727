#pragma once

#include <string>

#include "disinr/tensor.hpp"

namespace disinr {

// 8-bit binary PGM with min-max windowing over the image itself; the applied
// window is recorded in "<path>.window.txt" (lines "min <v>" / "max <v>") so
// intensities stay recoverable. A constant image maps to mid-gray.
void save_pgm(const std::string& path, const Tensor& image);

// Reads back an 8-bit binary PGM as values in [0,1] (gray/255).
Tensor load_pgm(const std::string& path);

}  // namespace disinr
