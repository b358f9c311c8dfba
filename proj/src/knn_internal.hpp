#ifndef RS2ACF_KNN_INTERNAL_HPP
#define RS2ACF_KNN_INTERNAL_HPP

#include <algorithm>
#include <vector>

#include "rs2acf/types.hpp"

namespace rs2acf::detail {

// Exact pairwise squared distances between columns; symmetric by
// construction, no Gram shortcut so exact ties stay exact.
inline Matrix pairwise_sqdist(const Matrix& x) {
  const auto n = x.cols();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = (x.col(i) - x.col(j)).squaredNorm();
      d(i, j) = v;
      d(j, i) = v;
    }
  return d;
}

// Neighbor lists from a squared-distance matrix. With include_ties, every
// index at the k-th smallest distance is kept; otherwise exactly k, ties
// resolved toward lower indices. Self is never a neighbor.
inline std::vector<std::vector<int>> knn_from_sqdist(const Matrix& d2, int k, bool include_ties) {
  const int n = static_cast<int>(d2.rows());
  const int kk = std::min(k, n - 1);
  std::vector<std::vector<int>> nbrs(n);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) {
    order.clear();
    for (int j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (d2(i, a) != d2(i, b)) return d2(i, a) < d2(i, b);
      return a < b;
    });
    const double kth = d2(i, order[kk - 1]);
    for (int idx = 0; idx < static_cast<int>(order.size()); ++idx) {
      if (idx < kk)
        nbrs[i].push_back(order[idx]);
      else if (include_ties && d2(i, order[idx]) == kth)
        nbrs[i].push_back(order[idx]);
      else
        break;
    }
  }
  return nbrs;
}

}  // namespace rs2acf::detail

#endif
