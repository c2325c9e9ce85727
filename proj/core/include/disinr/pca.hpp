#pragma once

#include <vector>

#include "disinr/tensor.hpp"

namespace disinr {

// Principal components of a feature matrix. `components` are the centered
// rows projected onto the retained unit directions; ratios are each retained
// eigenvalue over the total variance. When the matrix has fewer informative
// directions than requested, only those are returned and `truncated` is set;
// callers surface that as a warning.
struct PcaResult {
  Tensor components;  // [R x retained]
  Tensor directions;  // [D x retained], unit columns, descending variance
  std::vector<double> explained_variance;        // descending eigenvalues
  std::vector<double> explained_variance_ratio;  // fractions of total variance
  int requested = 0;
  bool truncated = false;

  int retained() const { return static_cast<int>(explained_variance.size()); }
};

// Column-centered covariance eigendecomposition of `features` [R x D],
// keeping the top `k` directions. Signs are fixed by making each direction's
// largest-magnitude entry positive, so repeated runs agree bitwise.
// Requires R > k >= 1.
PcaResult pca_features(const Tensor& features, int k);

}  // namespace disinr
