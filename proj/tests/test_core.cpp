#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "rs2acf/l21.hpp"
#include "test_helpers.hpp"

using namespace rs2acf;
using test_helpers::random_matrix;

TEST_CASE("l21_columns on known matrices") {
  CHECK(l21_columns(Matrix::Identity(2, 2)) == doctest::Approx(2.0).epsilon(1e-14));

  Matrix m(2, 2);
  m << 3, 0, 4, 0;  // columns (3,4) and (0,0)
  CHECK(l21_columns(m) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("l21_columns matches the reweighted-trace identity") {
  const Matrix m = random_matrix(3, 4, 7);
  const Vector w = reweight_cols(m, 1e-8);
  // 2 * tr(M diag(w) M^T) computed by scalar loops
  double trace = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) trace += m(i, j) * w(j) * m(i, j);
  CHECK(std::abs(l21_columns(m) - 2.0 * trace) <= 1e-10 * l21_columns(m));
}

TEST_CASE("l21 scaling and zero properties") {
  const Matrix m = random_matrix(5, 6, 11);
  CHECK(l21_columns(Matrix::Zero(4, 3)) == 0.0);
  CHECK(l21_columns(-2.5 * m) == doctest::Approx(2.5 * l21_columns(m)).epsilon(1e-12));
  CHECK(l21_columns(m) > 0.0);
}

TEST_CASE("l21_rows on known matrices and transpose duality") {
  CHECK(l21_rows(Matrix::Identity(2, 2)) == doctest::Approx(2.0).epsilon(1e-14));

  Matrix m(2, 2);
  m << 3, 4, 0, 0;
  CHECK(l21_rows(m) == doctest::Approx(5.0).epsilon(1e-14));

  const Matrix r = random_matrix(4, 7, 3);
  CHECK(l21_rows(r) == doctest::Approx(l21_columns(r.transpose())).epsilon(1e-14));
}

TEST_CASE("l21 rejects non-finite input") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(l21_columns(m), std::invalid_argument);
  CHECK_THROWS_AS(l21_rows(m), std::invalid_argument);
  m(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(l21_columns(m), std::invalid_argument);
}

TEST_CASE("reweight_cols guard and known values") {
  const Vector w0 = reweight_cols(Matrix::Zero(3, 4), 1e-8);
  for (int j = 0; j < 4; ++j) CHECK(w0(j) == doctest::Approx(1.0 / 2e-8).epsilon(1e-14));

  Matrix m = Matrix::Zero(2, 1);
  m(0, 0) = 0.5;  // column norm 0.5
  CHECK(reweight_cols(m, 1e-8)(0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("reweight_cols matches a scalar-loop oracle") {
  const Matrix e = random_matrix(6, 9, 21);
  const Vector w = reweight_cols(e, 1e-8);
  for (int j = 0; j < 9; ++j) {
    double ss = 0;
    for (int i = 0; i < 6; ++i) ss += e(i, j) * e(i, j);
    const double expect = 1.0 / (2.0 * std::max(std::sqrt(ss), 1e-8));
    CHECK(std::abs(w(j) - expect) <= 1e-14 * expect);
  }
}

TEST_CASE("reweight_rows guard, known value and oracle") {
  const Vector w0 = reweight_rows(Matrix::Zero(3, 4), 1e-8);
  for (int i = 0; i < 3; ++i) CHECK(w0(i) == doctest::Approx(1.0 / 2e-8).epsilon(1e-14));

  Matrix m = Matrix::Zero(1, 2);
  m(0, 0) = 2.0;  // row norm 2
  CHECK(reweight_rows(m, 1e-8)(0) == doctest::Approx(0.25).epsilon(1e-14));

  const Matrix p = random_matrix(7, 4, 33);
  const Vector w = reweight_rows(p, 1e-8);
  for (int i = 0; i < 7; ++i) {
    double ss = 0;
    for (int j = 0; j < 4; ++j) ss += p(i, j) * p(i, j);
    const double expect = 1.0 / (2.0 * std::max(std::sqrt(ss), 1e-8));
    CHECK(std::abs(w(i) - expect) <= 1e-14 * expect);
  }
}

TEST_CASE("reweight outputs are strictly positive") {
  for (std::uint64_t s : {1, 2, 3}) {
    const Matrix m = random_matrix(5, 5, s);
    CHECK((reweight_cols(m, 1e-8).array() > 0).all());
    CHECK((reweight_rows(m, 1e-8).array() > 0).all());
  }
  CHECK((reweight_cols(Matrix::Zero(3, 3), 1e-8).array() > 0).all());
}
