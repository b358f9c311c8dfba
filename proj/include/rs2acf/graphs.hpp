#ifndef RS2ACF_GRAPHS_HPP
#define RS2ACF_GRAPHS_HPP

#include "rs2acf/types.hpp"

namespace rs2acf::graphs {

/// Heat-kernel weights exp(-d^2 / (2 sigma^2)) on the OR-symmetrized k-NN
/// graph; sigma is the median distance over the graph's edges. Zero diagonal.
Matrix gaussian_weights(const Matrix& x, int k_neighbors);

/// Reconstruction weights: row i minimizes ||x_i - sum_j w_j x_j|| over the
/// k nearest neighbors subject to sum w = 1, with a Tikhonov-regularized
/// local Gram. Off-neighbor entries are zero.
Matrix lle_weights(const Matrix& x, int k_neighbors);

/// Pairwise cosine similarity clamped to [0, inf), zero diagonal.
Matrix cosine_weights(const Matrix& x);

/// Graph Laplacian L = D - S, D the row-sum diagonal. s must be symmetric.
Matrix laplacian(const Matrix& s);

/// ||X - X Q||_F^2 / ||X||_F^2.
double reconstruction_error(const Matrix& x, const Matrix& q);

}  // namespace rs2acf::graphs

#endif
