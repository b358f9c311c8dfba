#include "rs2acf/l21.hpp"

#include <algorithm>
#include <stdexcept>

namespace rs2acf {

namespace {

void require_finite(const Matrix& m) {
  if (!m.allFinite()) throw std::invalid_argument("l21: non-finite input");
}

}  // namespace

double l21_columns(const Matrix& m) {
  require_finite(m);
  return m.colwise().norm().sum();
}

double l21_rows(const Matrix& m) {
  require_finite(m);
  return m.rowwise().norm().sum();
}

Vector reweight_cols(const Matrix& e, double eps_norm) {
  require_finite(e);
  Vector w(e.cols());
  for (Eigen::Index j = 0; j < e.cols(); ++j)
    w(j) = 1.0 / (2.0 * std::max(e.col(j).norm(), eps_norm));
  return w;
}

Vector reweight_rows(const Matrix& p, double eps_norm) {
  require_finite(p);
  Vector w(p.rows());
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    w(i) = 1.0 / (2.0 * std::max(p.row(i).norm(), eps_norm));
  return w;
}

}  // namespace rs2acf
