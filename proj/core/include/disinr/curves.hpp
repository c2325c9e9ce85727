#pragma once

#include <string>
#include <utility>
#include <vector>

#include "disinr/runlog.hpp"

namespace disinr {

// PSNR-vs-iteration curve averaged over records.
struct ConvergenceCurve {
  std::vector<int> iterations;   // sorted ascending
  std::vector<double> mean_psnr;

  std::size_t size() const { return iterations.size(); }
};

// Aligns all logs on their iteration indices and averages the PSNR of every
// entry logged at that iteration. Entries without a PSNR (no ground truth)
// drop out of the mean; an iteration with no usable entries yields NaN.
ConvergenceCurve curve_report(const std::vector<RunLog>& logs);

// "method,iteration,mean_psnr" rows, one block per labeled curve; NaN means
// are written as empty fields.
void save_curves_csv(const std::string& path,
                     const std::vector<std::pair<std::string, ConvergenceCurve>>& curves);

}  // namespace disinr
