#pragma once

#include <map>
#include <string>
#include <vector>

#include "disinr/params.hpp"

namespace disinr {

struct TrainConfig {
  int iterations = 4000;
  double lr = 1e-3;
  double lr_decay = 0.5;
  int decay_interval = 1000;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  int log_interval = 50;
  // when non-empty, a diverging run dumps its parameters here before aborting
  std::string diverge_dump_path;

  bool operator==(const TrainConfig&) const = default;

  void validate() const;
};

// lr * decay^floor(iteration / interval), iterations counted from 0
double scheduled_lr(const TrainConfig& cfg, int iteration);

// Adam with bias correction over the unfrozen partitions of a ParameterSet.
// Moment buffers are per tensor, keyed by partition name, and held in double;
// partitions added after construction (spawned subjects) are picked up
// lazily. A tensor without an accumulated gradient counts as zero gradient.
class Adam {
 public:
  Adam(ParameterSet& params, TrainConfig cfg);

  // one update at the schedule position `iteration`; NaN gradients abort
  void step(int iteration);
  void reset_moments();

 private:
  struct Moments {
    std::vector<double> m, v;
  };

  ParameterSet& params_;
  TrainConfig cfg_;
  std::map<std::string, std::vector<Moments>> moments_;
  std::int64_t t_ = 0;  // completed steps, for bias correction
};

}  // namespace disinr
