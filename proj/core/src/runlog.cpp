#include "disinr/runlog.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace disinr {

void RunLog::append(RunLogEntry entry) {
  if (!entries_.empty() && entry.iteration < entries_.back().iteration)
    throw ConfigError("runlog: iteration indices must be non-decreasing");
  if (!std::isfinite(entry.loss))
    throw NumericalError("runlog: non-finite loss at iteration " +
                         std::to_string(entry.iteration));
  entries_.push_back(std::move(entry));
}

void RunLog::save_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw IoError("runlog: cannot open " + path);
  os << "iteration,subject_id,loss,psnr,wall_ms\n";
  char buf[160];
  for (const auto& e : entries_) {
    if (std::isnan(e.psnr_db))
      std::snprintf(buf, sizeof(buf), "%d,%s,%.9g,,%.3f\n", e.iteration, e.subject_id.c_str(),
                    e.loss, e.wall_ms);
    else
      std::snprintf(buf, sizeof(buf), "%d,%s,%.9g,%.9g,%.3f\n", e.iteration, e.subject_id.c_str(),
                    e.loss, e.psnr_db, e.wall_ms);
    os << buf;
  }
  if (!os) throw IoError("runlog: write failed: " + path);
}

}  // namespace disinr
