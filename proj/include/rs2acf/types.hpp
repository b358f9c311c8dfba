#ifndef RS2ACF_TYPES_HPP
#define RS2ACF_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace rs2acf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Partially labeled data matrix. Samples are columns; the first
/// num_labeled columns carry class labels, the rest are unlabeled.
struct Dataset {
  Matrix x;                 // D x N, features by samples
  int num_labeled = 0;      // l; columns [0, l) are labeled
  std::vector<int> labels;  // class id per labeled column, in [0, num_classes)
  int num_classes = 0;      // c

  int dim() const { return static_cast<int>(x.rows()); }
  int size() const { return static_cast<int>(x.cols()); }
  int num_unlabeled() const { return size() - num_labeled; }

  auto x_labeled() const { return x.leftCols(num_labeled); }
  auto x_unlabeled() const { return x.rightCols(num_unlabeled()); }

  // Throws std::invalid_argument on any violated invariant. num_labeled ==
  // size() (no unlabeled block) is accepted as a degenerate limit; it is what
  // a labeled fraction of 1.0 produces.
  void validate() const;
};

/// Solver hyperparameters and numerical guards.
struct HyperParams {
  double alpha = 1e4;   // adaptive-locality weight
  double beta = 1e-4;   // label-prediction weight
  double gamma = 1e4;   // sparse-error weight
  int rank = 0;         // factorization rank; 0 selects num_classes + 1
  double tol = 1e-4;    // stop when |obj_t - obj_{t+1}| <= tol
  int max_iter = 200;
  double eps_div = 1e-12;   // denominator guard for multiplicative updates
  double eps_norm = 1e-8;   // guard for reweighting diagonals
  std::uint64_t seed = 0;

  // Diagnostic switches: hold E (resp. Q) at its current value during fit.
  bool freeze_e = false;
  bool freeze_q = false;

  void validate() const;
};

/// Block label-constraint matrices: hard one-hot rows for labeled samples,
/// learned soft indicator for unlabeled ones.
struct LabelConstraint {
  Matrix a_l;  // l x c, one-hot rows
  Matrix a_u;  // u x c, nonnegative

  // Assembled (l+u) x 2c block diagonal [a_l 0; 0 a_u].
  Matrix assembled() const;
  // A * Z for Z stacked as [z_l; z_u]; returns the N x r representation.
  Matrix az(const Matrix& z_l, const Matrix& z_u) const;

  void validate() const;
};

/// All solver variables.
struct FactorState {
  Matrix w;    // N x r, nonnegative; rows [0, l) form W_L
  Matrix z_l;  // c x r, nonnegative
  Matrix z_u;  // c x r, nonnegative
  Matrix e;    // D x N, sparse error, real
  Matrix q;    // N x N, nonnegative, zero diagonal
  Matrix p;    // D x c, label predictor, real
  Vector s_diag;  // length N, > 0; column reweighting of E
  Vector b_diag;  // length D, > 0; row reweighting of P

  void validate() const;
};

/// Objective value per completed iteration.
struct ConvergenceTrace {
  std::vector<double> objective_values;
};

}  // namespace rs2acf

#endif
