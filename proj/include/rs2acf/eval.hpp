#ifndef RS2ACF_EVAL_HPP
#define RS2ACF_EVAL_HPP

#include <cstdint>
#include <vector>

#include "rs2acf/types.hpp"

namespace rs2acf::eval {

/// Clustering / classification scores with per-run detail.
struct EvalResult {
  std::vector<double> per_run;
  double mean = 0;
  double stddev = 0;  // sample standard deviation; 0 for a single run
};

EvalResult summarize(const std::vector<double>& per_run);

/// Lloyd's algorithm on the rows of v, best of n_restarts by within-cluster
/// sum of squares. Empty clusters are reseeded to the point farthest from its
/// own centroid. Deterministic given seed.
std::vector<int> kmeans(const Matrix& v, int k, int n_restarts, int max_iter, std::uint64_t seed);

/// Best-matching agreement between two labelings under optimal assignment on
/// the contingency matrix.
double clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

/// Mutual information normalized by the larger entropy; 0/0 -> 0.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth);

/// Nearest-neighbor labels (Euclidean), distance ties to the lowest training
/// index. Points are rows.
std::vector<int> knn1_classify(const Matrix& train, const std::vector<int>& train_labels,
                               const Matrix& test);

}  // namespace rs2acf::eval

#endif
