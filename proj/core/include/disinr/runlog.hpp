#pragma once

#include <string>
#include <vector>

#include "disinr/common.hpp"

namespace disinr {

// One logged training step. `psnr_db` is NaN when no ground truth was
// available; `wall_ms` is elapsed time since the run started.
struct RunLogEntry {
  int iteration = 0;
  std::string subject_id;
  double loss = 0.0;
  double psnr_db = 0.0;
  double wall_ms = 0.0;
};

class RunLog {
 public:
  // Enforces non-decreasing iterations and finite loss.
  void append(RunLogEntry entry);
  const std::vector<RunLogEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  // Header "iteration,subject_id,loss,psnr,wall_ms"; NaN psnr written as
  // an empty field.
  void save_csv(const std::string& path) const;

 private:
  std::vector<RunLogEntry> entries_;
};

}  // namespace disinr
