#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "rs2acf/baselines.hpp"
#include "rs2acf/rng.hpp"
#include "test_helpers.hpp"

using namespace rs2acf;
using namespace rs2acf::baselines;
using test_helpers::random_nonneg;
using test_helpers::rel_diff;

namespace {

// Reconstruction objective computed straight from X, independent of the
// kernel-trace route used by the library.
double direct_cf_objective(const Matrix& x, const Matrix& w, const Matrix& v) {
  return (x - x * w * v.transpose()).squaredNorm();
}

}  // namespace

TEST_CASE("nmf is a fixed point of its own exact factorization") {
  const Matrix u0 = random_nonneg(6, 3, 5);
  const Matrix v0 = random_nonneg(10, 3, 6);
  const Matrix x = u0 * v0.transpose();
  const NmfFactors f = nmf_fit(x, 3, 1, 0, 1e-12, {}, &u0, &v0);
  CHECK(rel_diff(f.u, u0) <= 1e-12);
  CHECK(rel_diff(f.v, v0) <= 1e-12);
}

TEST_CASE("nmf rejects negative data") {
  Matrix x = random_nonneg(4, 5, 1);
  x(2, 3) = -0.1;
  CHECK_THROWS_AS(nmf_fit(x, 2, 5, 0), std::invalid_argument);
}

TEST_CASE("nmf overcomplete rank drives the residual down") {
  const Matrix x = random_nonneg(8, 12, 42);
  const NmfFactors f = nmf_fit(x, 12, 800, 3);
  CHECK(nmf_objective(x, f) / x.squaredNorm() <= 1e-2);
}

TEST_CASE("nmf objective is non-increasing") {
  const Matrix x = random_nonneg(10, 20, 9);
  std::vector<double> obj;
  nmf_fit(x, 4, 60, 17, 1e-12, [&](int, const Matrix& u, const Matrix& v) {
    obj.push_back((x - u * v.transpose()).squaredNorm());
  });
  for (size_t t = 1; t < obj.size(); ++t) CHECK(obj[t] <= obj[t - 1] + 1e-10);
}

TEST_CASE("cf identity kernel fixed point") {
  const Matrix eye = Matrix::Identity(5, 5);
  const CfFactors f = cf_fit(eye, 5, 1, 0, 1e-12, {}, &eye, &eye);
  CHECK(test_helpers::max_abs_diff(f.w, eye) == 0.0);
  CHECK(test_helpers::max_abs_diff(f.v, eye) == 0.0);
}

TEST_CASE("cf rejects an asymmetric kernel") {
  Matrix k = random_nonneg(4, 4, 2);
  k(0, 1) = k(1, 0) + 1.0;
  CHECK_THROWS_AS(cf_fit(k, 2, 5, 0), std::invalid_argument);
}

TEST_CASE("cf on the identity data matrix converges to small error") {
  const int n = 6;
  const Matrix x = Matrix::Identity(n, n);
  const Matrix k = x.transpose() * x;
  const CfFactors f = cf_fit(k, n, 3000, 11);
  CHECK(direct_cf_objective(x, f.w, f.v) / x.squaredNorm() <= 1e-2);
}

TEST_CASE("cf objective is non-increasing on a random psd kernel") {
  const Matrix x = random_nonneg(7, 14, 23);
  const Matrix k = x.transpose() * x;
  std::vector<double> obj;
  cf_fit(k, 3, 60, 5, 1e-12, [&](int, const Matrix& w, const Matrix& v) {
    obj.push_back(direct_cf_objective(x, w, v));
  });
  for (size_t t = 1; t < obj.size(); ++t) CHECK(obj[t] <= obj[t - 1] + 1e-10);
}

TEST_CASE("lccf_weights on identical and orthogonal columns") {
  Matrix x(2, 3);
  x.col(0) << 1, 0;
  x.col(1) << 1, 0;  // identical to column 0
  x.col(2) << 0, 5;  // orthogonal to both
  const Matrix s = lccf_weights(x, 1);
  CHECK(s(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s(1, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s(0, 0) == 0.0);

  // force the orthogonal pair into each other's neighborhoods
  const Matrix s2 = lccf_weights(x, 2);
  CHECK(s2(0, 2) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("lccf_weights rejects a zero column") {
  Matrix x = random_nonneg(3, 4, 8);
  x.col(2).setZero();
  CHECK_THROWS_AS(lccf_weights(x, 1), std::invalid_argument);
}

TEST_CASE("lccf_weights matches a brute-force neighbor oracle") {
  const Matrix x = test_helpers::random_matrix(4, 5, 77, 0.1, 2.0);
  const int k = 2, n = 5;
  const Matrix s = lccf_weights(x, k);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        CHECK(s(i, j) == 0.0);
        continue;
      }
      // is j among the k nearest of i, or i among the k nearest of j?
      auto in_knn = [&](int center, int cand) {
        const double dc = (x.col(center) - x.col(cand)).squaredNorm();
        int closer = 0;
        for (int m = 0; m < n; ++m) {
          if (m == center || m == cand) continue;
          if ((x.col(center) - x.col(m)).squaredNorm() < dc) ++closer;
        }
        return closer < k;
      };
      const double expect =
          (in_knn(i, j) || in_knn(j, i))
              ? x.col(i).dot(x.col(j)) / (x.col(i).norm() * x.col(j).norm())
              : 0.0;
      CHECK(s(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("lccf with lambda 0 reproduces cf exactly") {
  const Matrix x = random_nonneg(6, 9, 31);
  const Matrix k = x.transpose() * x;
  const Matrix s = lccf_weights(x, 3);

  std::vector<Matrix> cf_w, cf_v, lccf_w, lccf_v;
  cf_fit(k, 3, 25, 13, 1e-12, [&](int, const Matrix& w, const Matrix& v) {
    cf_w.push_back(w);
    cf_v.push_back(v);
  });
  lccf_fit(k, s, 0.0, 3, 25, 13, 1e-12, [&](int, const Matrix& w, const Matrix& v) {
    lccf_w.push_back(w);
    lccf_v.push_back(v);
  });
  REQUIRE(cf_w.size() == lccf_w.size());
  for (size_t t = 0; t < cf_w.size(); ++t) {
    CHECK(test_helpers::max_abs_diff(cf_w[t], lccf_w[t]) <= 1e-12);
    CHECK(test_helpers::max_abs_diff(cf_v[t], lccf_v[t]) <= 1e-12);
  }
}

TEST_CASE("lccf with zero weights reproduces cf exactly") {
  const Matrix x = random_nonneg(5, 8, 41);
  const Matrix k = x.transpose() * x;
  const Matrix s = Matrix::Zero(8, 8);

  const CfFactors a = cf_fit(k, 2, 20, 7);
  const CfFactors b = lccf_fit(k, s, 3.5, 2, 20, 7);
  CHECK(test_helpers::max_abs_diff(a.w, b.w) <= 1e-12);
  CHECK(test_helpers::max_abs_diff(a.v, b.v) <= 1e-12);
}

TEST_CASE("lccf regularized objective is non-increasing") {
  const Matrix x = random_nonneg(6, 12, 19);
  const Matrix k = x.transpose() * x;
  const Matrix s = lccf_weights(x, 3);
  const double lambda = 2.0;

  std::vector<double> obj;
  lccf_fit(k, s, lambda, 3, 50, 29, 1e-12, [&](int, const Matrix& w, const Matrix& v) {
    // direct pairwise form of the graph penalty
    double reg = 0;
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j)
        reg += 0.5 * s(i, j) * (v.row(i) - v.row(j)).squaredNorm();
    obj.push_back(direct_cf_objective(x, w, v) + lambda * reg);
  });
  for (size_t t = 1; t < obj.size(); ++t) CHECK(obj[t] <= obj[t - 1] + 1e-10);
}

TEST_CASE("ccf constraint layout per the label blocks") {
  Dataset ds;
  ds.x = random_nonneg(3, 5, 3);
  ds.num_labeled = 3;
  ds.labels = {1, 0, 1};
  ds.num_classes = 2;
  const Matrix a = ccf_constraint(ds);
  REQUIRE(a.rows() == 5);
  REQUIRE(a.cols() == 4);  // c + u
  CHECK(a(0, 1) == 1.0);
  CHECK(a(1, 0) == 1.0);
  CHECK(a(2, 1) == 1.0);
  CHECK(a(3, 2) == 1.0);
  CHECK(a(4, 3) == 1.0);
  CHECK(a.sum() == doctest::Approx(5.0));
}

TEST_CASE("ccf with identity constraint reproduces cf with v = z") {
  const Matrix x = random_nonneg(5, 7, 57);
  const Matrix k = x.transpose() * x;
  const Matrix eye = Matrix::Identity(7, 7);

  std::vector<Matrix> cf_w, cf_v, ccf_w, ccf_z;
  cf_fit(k, 3, 25, 3, 1e-12, [&](int, const Matrix& w, const Matrix& v) {
    cf_w.push_back(w);
    cf_v.push_back(v);
  });
  ccf_fit(k, eye, 3, 25, 3, 1e-12, [&](int, const Matrix& w, const Matrix& z) {
    ccf_w.push_back(w);
    ccf_z.push_back(z);
  });
  REQUIRE(cf_w.size() == ccf_w.size());
  for (size_t t = 0; t < cf_w.size(); ++t) {
    CHECK(test_helpers::max_abs_diff(cf_w[t], ccf_w[t]) <= 1e-12);
    CHECK(test_helpers::max_abs_diff(cf_v[t], ccf_z[t]) <= 1e-12);
  }
}

TEST_CASE("ccf identity instance is a fixed point") {
  const Matrix eye = Matrix::Identity(6, 6);
  const CcfFactors f = ccf_fit(eye, eye, 6, 1, 0, 1e-12, {}, &eye, &eye);
  CHECK(test_helpers::max_abs_diff(f.w, eye) == 0.0);
  CHECK(test_helpers::max_abs_diff(f.z, eye) == 0.0);
}

TEST_CASE("ccf rejects malformed constraints") {
  const Matrix k = Matrix::Identity(4, 4);
  Matrix a = Matrix::Zero(4, 3);
  a(0, 0) = 1;
  a(1, 1) = 1;
  a(2, 2) = 1;
  a(3, 1) = 0.5;  // not one-hot
  CHECK_THROWS_AS(ccf_fit(k, a, 2, 5, 0), std::invalid_argument);
}

TEST_CASE("ccf objective is non-increasing on labeled data") {
  Dataset ds;
  ds.x = random_nonneg(6, 10, 91);
  ds.num_labeled = 4;
  ds.labels = {0, 1, 0, 1};
  ds.num_classes = 2;
  const Matrix k = ds.x.transpose() * ds.x;
  const Matrix a = ccf_constraint(ds);

  std::vector<double> obj;
  ccf_fit(k, a, 3, 50, 47, 1e-12, [&](int, const Matrix& w, const Matrix& z) {
    obj.push_back((ds.x - ds.x * w * (a * z).transpose()).squaredNorm());
  });
  for (size_t t = 1; t < obj.size(); ++t) CHECK(obj[t] <= obj[t - 1] + 1e-10);
}

TEST_CASE("multiplicative updates preserve nonnegativity") {
  const Matrix x = random_nonneg(5, 9, 67);
  const Matrix k = x.transpose() * x;
  cf_fit(k, 3, 30, 2, 1e-12, [&](int, const Matrix& w, const Matrix& v) {
    CHECK((w.array() >= 0).all());
    CHECK((v.array() >= 0).all());
  });
  nmf_fit(x, 3, 30, 2, 1e-12, [&](int, const Matrix& u, const Matrix& v) {
    CHECK((u.array() >= 0).all());
    CHECK((v.array() >= 0).all());
  });
}
