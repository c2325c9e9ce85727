#include "disinr/curves.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

namespace disinr {

ConvergenceCurve curve_report(const std::vector<RunLog>& logs) {
  std::map<int, std::pair<double, int>> acc;  // iteration -> (psnr sum, count)
  for (const RunLog& log : logs)
    for (const RunLogEntry& e : log.entries()) {
      auto& slot = acc[e.iteration];
      if (!std::isnan(e.psnr_db)) {
        slot.first += e.psnr_db;
        slot.second += 1;
      }
    }

  ConvergenceCurve curve;
  curve.iterations.reserve(acc.size());
  curve.mean_psnr.reserve(acc.size());
  for (const auto& [iter, slot] : acc) {
    curve.iterations.push_back(iter);
    curve.mean_psnr.push_back(slot.second > 0 ? slot.first / double(slot.second)
                                              : std::numeric_limits<double>::quiet_NaN());
  }
  return curve;
}

void save_curves_csv(const std::string& path,
                     const std::vector<std::pair<std::string, ConvergenceCurve>>& curves) {
  std::ofstream os(path);
  if (!os) throw IoError("curves: cannot open " + path);
  os << "method,iteration,mean_psnr\n";
  char buf[128];
  for (const auto& [method, curve] : curves) {
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (std::isnan(curve.mean_psnr[i]))
        std::snprintf(buf, sizeof(buf), "%s,%d,\n", method.c_str(), curve.iterations[i]);
      else
        std::snprintf(buf, sizeof(buf), "%s,%d,%.9g\n", method.c_str(), curve.iterations[i],
                      curve.mean_psnr[i]);
      os << buf;
    }
  }
  if (!os) throw IoError("curves: write failed: " + path);
}

}  // namespace disinr
