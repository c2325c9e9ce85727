#pragma once

#include <string>

#include "disinr/dataset.hpp"
#include "disinr/models.hpp"
#include "disinr/optimizer.hpp"
#include "disinr/phantom.hpp"

namespace disinr::cli {

enum class TaskKind { VolumeFit, Mri, Ct };

TaskKind task_from_string(const std::string& s);
std::string to_string(TaskKind task);

// Complete description of one experiment. The file format is a flat list of
// `key = value` lines with '#' comments; every key has a built-in default, so
// any subset of keys is a valid file. `task` and `preset` are read first and
// choose the defaults the remaining keys override, which makes key order
// irrelevant. Unknown and duplicate keys are rejected.
//
// All stored seeds are derived from the single top-level `seed` via named
// sub-streams, so the file only carries `seed` and reseed() re-derives the
// rest.
struct ExperimentConfig {
  TaskKind task = TaskKind::VolumeFit;
  std::string preset = "desk";  // "desk" | "paper"
  std::uint64_t seed = 0;

  ModelConfig model;            // channels are resolved from the task
  PhantomFamilyConfig phantom;
  int ct_views = 60;
  SamplingMaskConfig mask;
  int coils = 1;
  double noise_sigma = 0.0;
  double split_pretrain = 0.6;
  double split_test_in = 0.2;
  double split_test_out = 0.2;
  TrainConfig train;
  TrainConfig adapt;

  bool operator==(const ExperimentConfig&) const = default;

  // Re-derives phantom/mask/train/adapt seeds from `s`.
  void reseed(std::uint64_t s);
  void validate() const;
};

// Defaults for a preset/task combination (desk: 64 px, small tables; paper:
// 256 px, appendix-scale tables). Seeds are derived for seed = 0.
ExperimentConfig preset_config(const std::string& preset, TaskKind task);

// Strict parse: unknown key, duplicate key, malformed line or bad value throw
// ConfigError naming the line.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical echo containing every key; load_config(save_config(cfg)) compares
// equal to cfg.
std::string config_text(const ExperimentConfig& cfg);
void save_config(const std::string& path, const ExperimentConfig& cfg);

// Task-resolved views of the config.
ModelConfig resolved_model(const ExperimentConfig& cfg);
FanBeamGeometry resolved_geometry(const ExperimentConfig& cfg);  // ct only
OperatorDescriptor resolved_operator(const ExperimentConfig& cfg);

}  // namespace disinr::cli
