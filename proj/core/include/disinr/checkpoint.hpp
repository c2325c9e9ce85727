#pragma once

#include <string>

#include "disinr/models.hpp"

namespace disinr {

// Stable one-line description of a model configuration; stored in checkpoints
// and compared on load.
std::string config_echo(const ModelConfig& cfg);

// Self-describing binary container, magic "DISINR01", little-endian. Layout:
// magic, real width, config echo, then per partition: name, frozen flag and
// the tensor list (shapes + raw values).
void save_checkpoint(const std::string& path, const Model& model);

// Rebuilds the model recorded at `path` (partitions, values, frozen flags).
Model load_checkpoint(const std::string& path);

// As above, but rejects the file unless its config echo matches `expected`.
Model load_checkpoint(const std::string& path, const ModelConfig& expected);

}  // namespace disinr
