#ifndef RS2ACF_SOLVER_HPP
#define RS2ACF_SOLVER_HPP

#include <functional>
#include <utility>
#include <vector>

#include "rs2acf/types.hpp"

namespace rs2acf::solver {

/// The four groups of the objective, individually retrievable.
struct ObjectiveTerms {
  double reconstruction = 0;  // ||X - E - X W (A Z)^T||_F^2
  double sparsity = 0;        // gamma * l21_columns(E)
  double adaptive = 0;        // alpha * (data + representation + label recon through Q)
  double label = 0;           // beta * (indicator fits + row-sparse predictor)

  double total() const { return reconstruction + sparsity + adaptive + label; }
};

struct FitResult {
  Matrix representation;  // N x r, the assembled A * Z
  LabelConstraint lc;
  FactorState state;
  ConvergenceTrace trace;
};

/// Initialize all solver variables: ridge-regression label predictor from the
/// labeled block, indicator for unlabeled data clamped from its predictions,
/// cosine-similarity weights, random W and Z, zero E, unit diagonals.
std::pair<FactorState, LabelConstraint> init_state(const Dataset& ds, const HyperParams& hp);

ObjectiveTerms objective_terms(const Dataset& ds, const HyperParams& hp, const FactorState& st,
                               const LabelConstraint& lc);
double objective(const Dataset& ds, const HyperParams& hp, const FactorState& st,
                 const LabelConstraint& lc);

/// One multiplicative step on W; nonnegativity is preserved.
Matrix update_w(const Dataset& ds, const FactorState& st, const LabelConstraint& lc,
                double eps_div);

struct ZUpdate {
  Matrix z_l, z_u, a_u;
};

/// Joint multiplicative step on Z_L, Z_U and the unlabeled indicator A_U.
/// The reconstruction term enters in its labeled/unlabeled block-split form;
/// the locality term uses H = (I - Q)(I - Q)^T split into four blocks.
ZUpdate update_z_and_au(const Dataset& ds, const FactorState& st, const LabelConstraint& lc,
                        const HyperParams& hp);

/// Closed-form E: column j of the factorization residual scaled by
/// 1 / (1 + gamma * s_diag_j).
Matrix update_e(const Dataset& ds, const FactorState& st, const LabelConstraint& lc,
                double gamma);

/// One multiplicative step on the adaptive weights Q; the zero diagonal is
/// re-imposed afterwards. No-op when alpha == 0 (the subproblem vanishes).
Matrix update_q(const Dataset& ds, const FactorState& st, const LabelConstraint& lc, double alpha,
                double eps_div);

/// Closed-form P from the regularized normal equations. No-op when beta == 0
/// (the system is singular and P does not enter the remaining objective).
Matrix update_p(const Dataset& ds, const FactorState& st, const LabelConstraint& lc, double alpha,
                double beta);

/// Refreshed reweighting diagonals: s from the columns of E, b from the rows
/// of P.
std::pair<Vector, Vector> update_diagonals(const FactorState& st, double eps_norm);

using IterCallback =
    std::function<void(int iter, const FactorState& st, const LabelConstraint& lc)>;

/// Full alternating loop: Z/A_U, P, W, E, Q, diagonals, convergence check.
/// Stops when the absolute objective change drops to hp.tol or at
/// hp.max_iter. Deterministic for fixed inputs and seed.
FitResult fit(const Dataset& ds, const HyperParams& hp, const IterCallback& on_iter = {});

/// Hard labels for unlabeled samples: row-argmax of X_U^T P, ties to the
/// lowest class index.
std::vector<int> predict_labels(const Matrix& p, const Matrix& x_u);

}  // namespace rs2acf::solver

#endif
