#ifndef RS2ACF_BASELINES_HPP
#define RS2ACF_BASELINES_HPP

#include <cstdint>
#include <functional>

#include "rs2acf/types.hpp"

namespace rs2acf::baselines {

struct NmfFactors {
  Matrix u;  // D x r basis
  Matrix v;  // N x r coefficients
};

struct CfFactors {
  Matrix w;  // N x r
  Matrix v;  // N x r
};

struct CcfFactors {
  Matrix w;  // N x r
  Matrix z;  // (c+u) x r
  Matrix a;  // fixed (l+u) x (c+u) constraint
};

// Invoked after every iteration with the current factors; used by the
// reduction-equivalence and monotonicity tests.
using IterCallback = std::function<void(int iter, const Matrix& basis, const Matrix& coef)>;

// Hard label block stacked with an identity for the unlabeled samples:
// [A_L 0; 0 I_u]. This is the constraint CCF operates on.
Matrix ccf_constraint(const Dataset& ds);

/// Multiplicative-update NMF, X ~ U V^T. X must be entrywise nonnegative.
/// init_basis/init_coef warm-start the factors; the seed is unused then.
NmfFactors nmf_fit(const Matrix& x, int rank, int iters, std::uint64_t seed,
                   double eps_div = 1e-12, const IterCallback& on_iter = {},
                   const Matrix* init_basis = nullptr, const Matrix* init_coef = nullptr);

/// Concept factorization on a kernel K = X^T X, X ~ X W V^T.
CfFactors cf_fit(const Matrix& k, int rank, int iters, std::uint64_t seed,
                 double eps_div = 1e-12, const IterCallback& on_iter = {},
                 const Matrix* init_basis = nullptr, const Matrix* init_coef = nullptr);

/// Cosine edge weights on the k-NN graph (Euclidean neighborhoods,
/// OR-symmetrized, ties at the k-th distance included). Zero diagonal.
Matrix lccf_weights(const Matrix& x, int k_neighbors);

/// Locally consistent CF: graph-regularized coefficients with weights s.
CfFactors lccf_fit(const Matrix& k, const Matrix& s, double lambda, int rank, int iters,
                   std::uint64_t seed, double eps_div = 1e-12, const IterCallback& on_iter = {});

/// Constrained CF with representation V = A Z.
CcfFactors ccf_fit(const Matrix& k, const Matrix& a, int rank, int iters, std::uint64_t seed,
                   double eps_div = 1e-12, const IterCallback& on_iter = {},
                   const Matrix* init_basis = nullptr, const Matrix* init_coef = nullptr);

// Objective values, used as monotonicity oracles and by the CLI traces.
double nmf_objective(const Matrix& x, const NmfFactors& f);
double cf_objective(const Matrix& k, const CfFactors& f);
double lccf_objective(const Matrix& k, const Matrix& s, double lambda, const CfFactors& f);
double ccf_objective(const Matrix& k, const CcfFactors& f);

}  // namespace rs2acf::baselines

#endif
