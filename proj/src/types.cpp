#include "rs2acf/types.hpp"

#include <stdexcept>
#include <string>

namespace rs2acf {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void Dataset::validate() const {
  require(x.size() > 0, "dataset: empty matrix");
  require(x.allFinite(), "dataset: non-finite entries");
  require(num_labeled >= 1 && num_labeled <= size(),
          "dataset: num_labeled must be in [1, N]");
  require(static_cast<int>(labels.size()) == num_labeled,
          "dataset: labels size must equal num_labeled");
  require(num_classes >= 2, "dataset: num_classes must be >= 2");
  std::vector<bool> seen(num_classes, false);
  for (int c : labels) {
    require(c >= 0 && c < num_classes, "dataset: label out of range");
    seen[c] = true;
  }
  for (int c = 0; c < num_classes; ++c)
    require(seen[c], "dataset: class " + std::to_string(c) + " has no labeled sample");
}

void HyperParams::validate() const {
  require(alpha >= 0 && beta >= 0 && gamma >= 0, "hyperparams: weights must be >= 0");
  require(rank >= 0, "hyperparams: rank must be >= 1 (or 0 for num_classes + 1)");
  require(tol > 0, "hyperparams: tol must be > 0");
  require(max_iter >= 1, "hyperparams: max_iter must be >= 1");
  require(eps_div > 0 && eps_norm > 0, "hyperparams: guards must be > 0");
}

Matrix LabelConstraint::assembled() const {
  const auto l = a_l.rows();
  const auto u = a_u.rows();
  const auto c = a_l.cols();
  Matrix a = Matrix::Zero(l + u, 2 * c);
  a.topLeftCorner(l, c) = a_l;
  a.bottomRightCorner(u, c) = a_u;
  return a;
}

Matrix LabelConstraint::az(const Matrix& z_l, const Matrix& z_u) const {
  Matrix v(a_l.rows() + a_u.rows(), z_l.cols());
  v.topRows(a_l.rows()) = a_l * z_l;
  v.bottomRows(a_u.rows()) = a_u * z_u;
  return v;
}

void LabelConstraint::validate() const {
  require(a_l.cols() == a_u.cols(), "label constraint: class-count mismatch");
  require(a_l.allFinite() && a_u.allFinite(), "label constraint: non-finite entries");
  require((a_u.array() >= 0).all(), "label constraint: a_u has negative entries");
  for (Eigen::Index i = 0; i < a_l.rows(); ++i) {
    int ones = 0;
    for (Eigen::Index j = 0; j < a_l.cols(); ++j) {
      const double v = a_l(i, j);
      if (v == 1.0)
        ++ones;
      else
        require(v == 0.0, "label constraint: a_l row is not one-hot");
    }
    require(ones == 1, "label constraint: a_l row is not one-hot");
  }
}

void FactorState::validate() const {
  require(w.allFinite() && z_l.allFinite() && z_u.allFinite() && e.allFinite() &&
              q.allFinite() && p.allFinite(),
          "state: non-finite entries");
  require((w.array() >= 0).all(), "state: W has negative entries");
  require((z_l.array() >= 0).all() && (z_u.array() >= 0).all(),
          "state: Z has negative entries");
  require((q.array() >= 0).all(), "state: Q has negative entries");
  require(q.diagonal().isZero(0.0), "state: Q diagonal must be exactly zero");
  require(s_diag.allFinite() && (s_diag.array() > 0).all(), "state: s_diag must be > 0");
  require(b_diag.allFinite() && (b_diag.array() > 0).all(), "state: b_diag must be > 0");
}

}  // namespace rs2acf
