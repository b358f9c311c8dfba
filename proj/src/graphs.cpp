#include "rs2acf/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "knn_internal.hpp"

namespace rs2acf::graphs {

Matrix gaussian_weights(const Matrix& x, int k_neighbors) {
  const int n = static_cast<int>(x.cols());
  if (n < 2) throw std::invalid_argument("gaussian_weights: need at least 2 samples");
  if (k_neighbors < 1) throw std::invalid_argument("gaussian_weights: k must be >= 1");

  const Matrix d2 = detail::pairwise_sqdist(x);
  const auto nbrs = detail::knn_from_sqdist(d2, k_neighbors, /*include_ties=*/true);

  // OR-symmetrized edge set; each undirected edge contributes one distance to
  // the kernel-width estimate.
  std::vector<std::pair<int, int>> edges;
  Matrix adj = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j : nbrs[i]) {
      if (adj(i, j) == 0.0) {
        adj(i, j) = 1.0;
        adj(j, i) = 1.0;
        if (i < j)
          edges.emplace_back(i, j);
        else
          edges.emplace_back(j, i);
      }
    }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<double> dist;
  dist.reserve(edges.size());
  for (auto [i, j] : edges) dist.push_back(std::sqrt(d2(i, j)));
  std::sort(dist.begin(), dist.end());
  double sigma;
  const size_t m = dist.size();
  if (m % 2 == 1)
    sigma = dist[m / 2];
  else
    sigma = 0.5 * (dist[m / 2 - 1] + dist[m / 2]);
  if (sigma <= 0) sigma = 1.0;  // all edge distances zero; weights become exp(0)

  Matrix w = Matrix::Zero(n, n);
  for (auto [i, j] : edges) {
    const double v = std::exp(-d2(i, j) / (2.0 * sigma * sigma));
    w(i, j) = v;
    w(j, i) = v;
  }
  w.diagonal().setZero();
  return w;
}

Matrix lle_weights(const Matrix& x, int k_neighbors) {
  const int n = static_cast<int>(x.cols());
  if (k_neighbors < 1 || k_neighbors >= n)
    throw std::invalid_argument("lle_weights: need 1 <= k < N");

  const Matrix d2 = detail::pairwise_sqdist(x);
  const auto nbrs = detail::knn_from_sqdist(d2, k_neighbors, /*include_ties=*/false);

  Matrix w = Matrix::Zero(n, n);
  const int k = k_neighbors;
  for (int i = 0; i < n; ++i) {
    Matrix diffs(x.rows(), k);
    for (int a = 0; a < k; ++a) diffs.col(a) = x.col(i) - x.col(nbrs[i][a]);
    Matrix gram = diffs.transpose() * diffs;
    double reg = 1e-3 * gram.trace() / k;
    if (reg <= 0) reg = 1e-12;  // coincident neighborhood; falls back to equal weights
    gram.diagonal().array() += reg;
    Vector sol = gram.ldlt().solve(Vector::Ones(k));
    sol /= sol.sum();
    for (int a = 0; a < k; ++a) w(i, nbrs[i][a]) = sol(a);
  }
  return w;
}

Matrix cosine_weights(const Matrix& x) {
  const int n = static_cast<int>(x.cols());
  if (n < 1) throw std::invalid_argument("cosine_weights: empty input");
  Vector norms = x.colwise().norm();
  if (norms.minCoeff() <= 0) throw std::invalid_argument("cosine_weights: zero-norm column");

  Matrix q = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = std::max(0.0, x.col(i).dot(x.col(j)) / (norms(i) * norms(j)));
      q(i, j) = v;
      q(j, i) = v;
    }
  return q;
}

Matrix laplacian(const Matrix& s) {
  if (s.rows() != s.cols()) throw std::invalid_argument("laplacian: matrix must be square");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("laplacian: weights must be symmetric");
  Matrix l = -s;
  l.diagonal() += s.rowwise().sum();
  return l;
}

double reconstruction_error(const Matrix& x, const Matrix& q) {
  if (q.rows() != x.cols() || q.cols() != x.cols())
    throw std::invalid_argument("reconstruction_error: weight shape mismatch");
  const double denom = x.squaredNorm();
  if (denom <= 0) throw std::invalid_argument("reconstruction_error: zero data matrix");
  return (x - x * q).squaredNorm() / denom;
}

}  // namespace rs2acf::graphs
