#ifndef RS2ACF_L21_HPP
#define RS2ACF_L21_HPP

#include "rs2acf/types.hpp"

namespace rs2acf {

/// Sum of 2-norms of the columns of m (per-sample structured sparsity).
double l21_columns(const Matrix& m);

/// Sum of 2-norms of the rows of m.
double l21_rows(const Matrix& m);

/// Reweighting diagonal for the column-wise L2,1 surrogate:
/// w_j = 1 / (2 * max(||m_col_j||, eps_norm)). Strictly positive.
Vector reweight_cols(const Matrix& e, double eps_norm);

/// Row-wise analogue of reweight_cols.
Vector reweight_rows(const Matrix& p, double eps_norm);

}  // namespace rs2acf

#endif
