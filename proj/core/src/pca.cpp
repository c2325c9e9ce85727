#include "disinr/pca.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace disinr {

PcaResult pca_features(const Tensor& features, int k) {
  if (!features.defined() || features.ndim() != 2)
    throw DimensionError("pca expects a [R x D] feature matrix");
  const std::int64_t rows = features.dim(0), dim = features.dim(1);
  if (k < 1) throw ConfigError("pca: need k >= 1");
  if (rows <= k) throw ConfigError("pca: need more rows than components");

  Eigen::MatrixXd x(rows, dim);
  {
    auto v = features.data();
    for (std::int64_t r = 0; r < rows; ++r)
      for (std::int64_t c = 0; c < dim; ++c) x(r, c) = double(v[r * dim + c]);
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;

  const Eigen::MatrixXd cov = (x.transpose() * x) / double(rows - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw NumericalError("pca: eigendecomposition failed");

  // Eigen sorts ascending; walk from the back for descending variance.
  const auto& evals = solver.eigenvalues();
  const auto& evecs = solver.eigenvectors();
  const double total = std::max(evals.sum(), 0.0);
  const double floor = std::max(double(dim), double(rows)) * 1e-12 *
                       std::max(evals(dim - 1), 0.0);

  PcaResult res;
  res.requested = k;
  const int limit = static_cast<int>(std::min<std::int64_t>(k, dim));
  std::vector<Eigen::VectorXd> dirs;
  for (int i = 0; i < limit; ++i) {
    const double ev = evals(dim - 1 - i);
    if (ev <= floor) break;
    Eigen::VectorXd dir = evecs.col(dim - 1 - i);
    std::int64_t peak = 0;
    for (std::int64_t d = 1; d < dim; ++d)
      if (std::abs(dir(d)) > std::abs(dir(peak))) peak = d;
    if (dir(peak) < 0.0) dir = -dir;
    dirs.push_back(std::move(dir));
    res.explained_variance.push_back(ev);
    res.explained_variance_ratio.push_back(total > 0.0 ? ev / total : 0.0);
  }
  res.truncated = static_cast<int>(dirs.size()) < k;
  if (dirs.empty()) throw NumericalError("pca: features carry no variance");

  const auto kept = static_cast<std::int64_t>(dirs.size());
  res.directions = Tensor::zeros({dim, kept});
  res.components = Tensor::zeros({rows, kept});
  auto dv = res.directions.data_mut();
  auto cv = res.components.data_mut();
  for (std::int64_t j = 0; j < kept; ++j) {
    for (std::int64_t d = 0; d < dim; ++d) dv[d * kept + j] = static_cast<real>(dirs[j](d));
    const Eigen::VectorXd proj = x * dirs[j];
    for (std::int64_t r = 0; r < rows; ++r) cv[r * kept + j] = static_cast<real>(proj(r));
  }
  return res;
}

}  // namespace disinr
