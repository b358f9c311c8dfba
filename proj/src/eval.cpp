#include "rs2acf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "rs2acf/rng.hpp"

namespace rs2acf::eval {

namespace {

// Map arbitrary label values to 0..k-1 in order of first appearance.
std::vector<int> compact(const std::vector<int>& labels, int& k_out) {
  std::unordered_map<int, int> ids;
  std::vector<int> out(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = ids.try_emplace(labels[i], static_cast<int>(ids.size()));
    out[i] = it->second;
  }
  k_out = static_cast<int>(ids.size());
  return out;
}

// Hungarian algorithm (potentials form) minimizing total cost on a square
// matrix. Returns the column matched to each row.
std::vector<int> min_cost_assignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0);  // row matched to each column, 1-based
  std::vector<int> way(n + 1, 0);

  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> row_to_col(n);
  for (int j = 1; j <= n; ++j)
    if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

Matrix contingency(const std::vector<int>& a, int ka, const std::vector<int>& b, int kb) {
  Matrix c = Matrix::Zero(ka, kb);
  for (size_t i = 0; i < a.size(); ++i) c(a[i], b[i]) += 1.0;
  return c;
}

}  // namespace

EvalResult summarize(const std::vector<double>& per_run) {
  EvalResult r;
  r.per_run = per_run;
  if (per_run.empty()) return r;
  double sum = 0;
  for (double v : per_run) sum += v;
  r.mean = sum / static_cast<double>(per_run.size());
  if (per_run.size() >= 2) {
    double ss = 0;
    for (double v : per_run) ss += (v - r.mean) * (v - r.mean);
    r.stddev = std::sqrt(ss / static_cast<double>(per_run.size() - 1));
  }
  return r;
}

std::vector<int> kmeans(const Matrix& v, int k, int n_restarts, int max_iter, std::uint64_t seed) {
  const int n = static_cast<int>(v.rows());
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (k > n) throw std::invalid_argument("kmeans: k exceeds the number of points");
  if (n_restarts < 1 || max_iter < 1)
    throw std::invalid_argument("kmeans: restarts and max_iter must be >= 1");

  std::vector<int> best_assign(n, 0);
  double best_wcss = std::numeric_limits<double>::infinity();

  std::vector<int> idx(n);
  for (int restart = 0; restart < n_restarts; ++restart) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(restart)));

    // k distinct rows as initial centroids (partial Fisher-Yates).
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
      std::swap(idx[i], idx[j]);
    }
    Matrix centers(k, v.cols());
    for (int i = 0; i < k; ++i) centers.row(i) = v.row(idx[i]);

    std::vector<int> assign(n, -1), prev(n, -2);
    for (int it = 0; it < max_iter; ++it) {
      // Assignment, ties to the lowest center index.
      for (int i = 0; i < n; ++i) {
        int best = 0;
        double bd = (v.row(i) - centers.row(0)).squaredNorm();
        for (int c = 1; c < k; ++c) {
          const double d = (v.row(i) - centers.row(c)).squaredNorm();
          if (d < bd) {
            bd = d;
            best = c;
          }
        }
        assign[i] = best;
      }

      // Reseed empty clusters to the farthest point from its own centroid.
      std::vector<int> count(k, 0);
      for (int i = 0; i < n; ++i) ++count[assign[i]];
      for (int c = 0; c < k; ++c) {
        if (count[c] > 0) continue;
        int far = -1;
        double fd = -1.0;
        for (int i = 0; i < n; ++i) {
          if (count[assign[i]] <= 1) continue;
          const double d = (v.row(i) - centers.row(assign[i])).squaredNorm();
          if (d > fd) {
            fd = d;
            far = i;
          }
        }
        if (far < 0) break;  // fewer distinct points than clusters
        --count[assign[far]];
        assign[far] = c;
        ++count[c];
      }

      // Means.
      centers.setZero();
      for (int i = 0; i < n; ++i) centers.row(assign[i]) += v.row(i);
      for (int c = 0; c < k; ++c)
        if (count[c] > 0) centers.row(c) /= static_cast<double>(count[c]);

      if (assign == prev) break;
      prev = assign;
    }

    double wcss = 0;
    for (int i = 0; i < n; ++i) wcss += (v.row(i) - centers.row(assign[i])).squaredNorm();
    if (wcss < best_wcss) {
      best_wcss = wcss;
      best_assign = assign;
    }
  }
  return best_assign;
}

double clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("clustering_accuracy: length mismatch");
  if (pred.empty()) throw std::invalid_argument("clustering_accuracy: empty input");

  int kp = 0, kt = 0;
  const auto p = compact(pred, kp);
  const auto t = compact(truth, kt);
  const int s = std::max(kp, kt);

  Matrix counts = Matrix::Zero(s, s);  // padded with zero rows/columns
  counts.topLeftCorner(kp, kt) = contingency(p, kp, t, kt);

  const double top = counts.maxCoeff();
  const Matrix cost = Matrix::Constant(s, s, top) - counts;
  const auto match = min_cost_assignment(cost);

  double agree = 0;
  for (int i = 0; i < s; ++i) agree += counts(i, match[i]);
  return agree / static_cast<double>(pred.size());
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("nmi: length mismatch");
  if (pred.empty()) throw std::invalid_argument("nmi: empty input");

  int kp = 0, kt = 0;
  const auto p = compact(pred, kp);
  const auto t = compact(truth, kt);
  const double n = static_cast<double>(pred.size());
  const Matrix joint = contingency(p, kp, t, kt);
  const Vector rows = joint.rowwise().sum();
  const Vector cols = joint.colwise().sum();

  double mi = 0;
  for (int i = 0; i < kp; ++i)
    for (int j = 0; j < kt; ++j) {
      const double nij = joint(i, j);
      if (nij > 0) mi += (nij / n) * std::log(n * nij / (rows(i) * cols(j)));
    }

  double hp = 0, ht = 0;
  for (int i = 0; i < kp; ++i) hp -= (rows(i) / n) * std::log(rows(i) / n);
  for (int j = 0; j < kt; ++j) ht -= (cols(j) / n) * std::log(cols(j) / n);

  const double denom = std::max(hp, ht);
  if (denom <= 0) return 0.0;  // both partitions degenerate
  return std::clamp(mi / denom, 0.0, 1.0);
}

std::vector<int> knn1_classify(const Matrix& train, const std::vector<int>& train_labels,
                               const Matrix& test) {
  if (train.rows() == 0) throw std::invalid_argument("knn1: empty training set");
  if (static_cast<size_t>(train.rows()) != train_labels.size())
    throw std::invalid_argument("knn1: label count mismatch");
  if (train.cols() != test.cols()) throw std::invalid_argument("knn1: dimension mismatch");

  std::vector<int> out(test.rows());
  for (Eigen::Index i = 0; i < test.rows(); ++i) {
    Eigen::Index best = 0;
    double bd = (train.row(0) - test.row(i)).squaredNorm();
    for (Eigen::Index j = 1; j < train.rows(); ++j) {
      const double d = (train.row(j) - test.row(i)).squaredNorm();
      if (d < bd) {  // strict: ties keep the lowest training index
        bd = d;
        best = j;
      }
    }
    out[i] = train_labels[best];
  }
  return out;
}

}  // namespace rs2acf::eval
