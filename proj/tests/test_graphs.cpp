#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "rs2acf/graphs.hpp"
#include "test_helpers.hpp"

using namespace rs2acf;
using namespace rs2acf::graphs;
using test_helpers::random_matrix;
using test_helpers::random_nonneg;

TEST_CASE("gaussian weights of coincident mutual neighbors") {
  Matrix x(2, 3);
  x.col(0) << 1, 1;
  x.col(1) << 1, 1;  // same point
  x.col(2) << 4, 5;
  const Matrix w = gaussian_weights(x, 1);
  CHECK(w(0, 1) == doctest::Approx(1.0).epsilon(1e-14));  // exp(0)
  CHECK(w(0, 0) == 0.0);
}

TEST_CASE("gaussian weight at distance sigma*sqrt(2) equals 1/e") {
  // Line of 4 points with consecutive gaps 1, 1, sqrt(2). With k=1 the edges
  // are (0,1), (1,2), (2,3); the median edge distance is 1, so sigma = 1 and
  // the (2,3) edge lands exactly at exp(-1).
  Matrix x(1, 4);
  x << 0.0, 1.0, 2.0, 2.0 + std::sqrt(2.0);
  const Matrix w = gaussian_weights(x, 1);
  CHECK(w(2, 3) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(w(0, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("gaussian weights match a scalar recomputation") {
  const int n = 6, k = 2;
  const Matrix x = random_matrix(3, n, 5, -2, 2);
  const Matrix w = gaussian_weights(x, k);

  // recompute neighborhoods and sigma by hand
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d[i][j] = (x.col(i) - x.col(j)).norm();

  auto in_knn = [&](int center, int cand) {
    int closer = 0;
    for (int m = 0; m < n; ++m)
      if (m != center && m != cand && d[center][m] < d[center][cand]) ++closer;
    return closer < k;
  };

  std::vector<double> edge_dists;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (in_knn(i, j) || in_knn(j, i)) edge_dists.push_back(d[i][j]);
  std::sort(edge_dists.begin(), edge_dists.end());
  const size_t m = edge_dists.size();
  const double sigma =
      (m % 2 == 1) ? edge_dists[m / 2] : 0.5 * (edge_dists[m / 2 - 1] + edge_dists[m / 2]);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double expect = 0;
      if (i != j && (in_knn(i, j) || in_knn(j, i)))
        expect = std::exp(-d[i][j] * d[i][j] / (2 * sigma * sigma));
      CHECK(w(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("gaussian weights require at least two samples") {
  CHECK_THROWS_AS(gaussian_weights(Matrix::Ones(3, 1), 1), std::invalid_argument);
}

TEST_CASE("lle weights of a midpoint are half and half") {
  Matrix x(2, 3);
  x.col(0) << 0, 0;
  x.col(1) << 2, 0;
  x.col(2) << 1, 0;  // midway between 0 and 1
  const Matrix w = lle_weights(x, 2);
  CHECK(w(2, 0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(w(2, 1) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("lle weight on a coincident neighbor is one") {
  Matrix x(2, 3);
  x.col(0) << 1, 2;
  x.col(1) << 1, 2;  // equal to column 0
  x.col(2) << 9, 9;
  const Matrix w = lle_weights(x, 1);
  CHECK(w(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lle reconstruction matches a constrained least-squares oracle") {
  const int n = 8, k = 3;
  const Matrix x = random_matrix(5, n, 13, -1, 1);
  const Matrix w = lle_weights(x, k);

  for (int i = 0; i < n; ++i) {
    // the row reconstructs x_i at least as well as the oracle solution of the
    // same regularized system, solved independently via full pivoting
    std::vector<int> nbrs;
    std::vector<std::pair<double, int>> byd;
    for (int j = 0; j < n; ++j)
      if (j != i) byd.push_back({(x.col(i) - x.col(j)).squaredNorm(), j});
    std::sort(byd.begin(), byd.end());
    for (int a = 0; a < k; ++a) nbrs.push_back(byd[a].second);

    Matrix g(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        g(a, b) = (x.col(i) - x.col(nbrs[a])).dot(x.col(i) - x.col(nbrs[b]));
    Matrix reg = g + (1e-3 * g.trace() / k) * Matrix::Identity(k, k);
    Vector sol = Eigen::FullPivLU<Matrix>(reg).solve(Vector::Ones(k));
    sol /= sol.sum();

    Vector recon_lib = Vector::Zero(5), recon_oracle = Vector::Zero(5);
    for (int a = 0; a < k; ++a) {
      recon_lib += w(i, nbrs[a]) * x.col(nbrs[a]);
      recon_oracle += sol(a) * x.col(nbrs[a]);
    }
    CHECK((recon_lib - recon_oracle).norm() <= 1e-8);

    double rowsum = 0;
    for (int j = 0; j < n; ++j) rowsum += w(i, j);
    CHECK(rowsum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("cosine weights on identical, orthogonal and antiparallel columns") {
  Matrix x(2, 4);
  x.col(0) << 1, 0;
  x.col(1) << 2, 0;   // parallel to 0
  x.col(2) << 0, 3;   // orthogonal to 0
  x.col(3) << -1, 0;  // antiparallel to 0
  const Matrix q = cosine_weights(x);
  CHECK(q(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(q(0, 2) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(q(0, 3) == 0.0);  // clamped
  CHECK(q.diagonal().isZero(0.0));

  Matrix bad = x;
  bad.col(1).setZero();
  CHECK_THROWS_AS(cosine_weights(bad), std::invalid_argument);
}

TEST_CASE("laplacian on trivial graphs") {
  CHECK(laplacian(Matrix::Zero(3, 3)).isZero(0.0));

  Matrix s(2, 2);
  s << 0, 1, 1, 0;
  Matrix expect(2, 2);
  expect << 1, -1, -1, 1;
  CHECK(test_helpers::max_abs_diff(laplacian(s), expect) == 0.0);
}

TEST_CASE("laplacian is psd with zero row sums") {
  Matrix s = random_nonneg(7, 7, 3);
  s = ((s + s.transpose()) / 2).eval();
  s.diagonal().setZero();
  const Matrix l = laplacian(s);

  CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-10);
  Eigen::SelfAdjointEigenSolver<Matrix> es(l);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);

  const Vector v = random_matrix(7, 1, 9);
  CHECK(v.dot(l * v) >= -1e-10);
}

TEST_CASE("laplacian rejects asymmetric input") {
  Matrix s = random_nonneg(4, 4, 8);
  s(1, 2) = s(2, 1) + 0.5;
  CHECK_THROWS_AS(laplacian(s), std::invalid_argument);
}

TEST_CASE("reconstruction error extremes") {
  const Matrix x = random_matrix(4, 6, 21, 0.5, 2.0);
  CHECK(reconstruction_error(x, Matrix::Zero(6, 6)) == doctest::Approx(1.0).epsilon(1e-14));

  // duplicated columns with the swap permutation reconstruct exactly
  Matrix dup(3, 2);
  dup.col(0) << 1, 2, 3;
  dup.col(1) << 1, 2, 3;
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(reconstruction_error(dup, swap) == doctest::Approx(0.0).epsilon(1e-14));

  CHECK_THROWS_AS(reconstruction_error(Matrix::Zero(3, 3), Matrix::Zero(3, 3)),
                  std::invalid_argument);
}
