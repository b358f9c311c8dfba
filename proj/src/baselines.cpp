#include "rs2acf/baselines.hpp"

#include <stdexcept>

#include "knn_internal.hpp"
#include "rs2acf/rng.hpp"

namespace rs2acf::baselines {

namespace {

void check_kernel(const Matrix& k) {
  if (k.rows() != k.cols()) throw std::invalid_argument("cf: kernel must be square");
  if (!k.allFinite()) throw std::invalid_argument("cf: kernel has non-finite entries");
  if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("cf: kernel is not symmetric");
  if (k.minCoeff() < 0)
    throw std::invalid_argument("cf: kernel has negative entries; updates need K >= 0");
}

// factor <- factor .* num ./ den, denominator guarded away from zero.
Matrix mu_step(const Matrix& cur, const Matrix& num, const Matrix& den, double eps) {
  return (cur.array() * num.array().max(0.0) / den.array().max(eps)).matrix();
}

}  // namespace

Matrix ccf_constraint(const Dataset& ds) {
  ds.validate();
  const int l = ds.num_labeled, u = ds.num_unlabeled(), c = ds.num_classes;
  Matrix a = Matrix::Zero(l + u, c + u);
  for (int i = 0; i < l; ++i) a(i, ds.labels[i]) = 1.0;
  a.bottomRightCorner(u, u) = Matrix::Identity(u, u);
  return a;
}

NmfFactors nmf_fit(const Matrix& x, int rank, int iters, std::uint64_t seed, double eps_div,
                   const IterCallback& on_iter, const Matrix* init_basis,
                   const Matrix* init_coef) {
  if (!x.allFinite()) throw std::invalid_argument("nmf: non-finite input");
  if (x.minCoeff() < 0)
    throw std::invalid_argument("nmf: input has negative entries; shift the data first");
  if (rank < 1 || iters < 1) throw std::invalid_argument("nmf: rank and iters must be >= 1");

  NmfFactors f;
  if (init_basis && init_coef) {
    f.u = *init_basis;
    f.v = *init_coef;
  } else {
    Rng rng(seed);
    f.u.resize(x.rows(), rank);
    f.v.resize(x.cols(), rank);
    fill_uniform(f.u, rng);
    fill_uniform(f.v, rng);
  }

  for (int it = 1; it <= iters; ++it) {
    f.v = mu_step(f.v, x.transpose() * f.u, f.v * (f.u.transpose() * f.u), eps_div);
    f.u = mu_step(f.u, x * f.v, f.u * (f.v.transpose() * f.v), eps_div);
    if (on_iter) on_iter(it, f.u, f.v);
  }
  return f;
}

CfFactors cf_fit(const Matrix& k, int rank, int iters, std::uint64_t seed, double eps_div,
                 const IterCallback& on_iter, const Matrix* init_basis, const Matrix* init_coef) {
  check_kernel(k);
  if (rank < 1 || iters < 1) throw std::invalid_argument("cf: rank and iters must be >= 1");

  CfFactors f;
  if (init_basis && init_coef) {
    f.w = *init_basis;
    f.v = *init_coef;
  } else {
    Rng rng(seed);
    f.w.resize(k.rows(), rank);
    f.v.resize(k.rows(), rank);
    fill_uniform(f.w, rng);
    fill_uniform(f.v, rng);
  }

  for (int it = 1; it <= iters; ++it) {
    f.v = mu_step(f.v, k * f.w, f.v * (f.w.transpose() * (k * f.w)), eps_div);
    f.w = mu_step(f.w, k * f.v, (k * f.w) * (f.v.transpose() * f.v), eps_div);
    if (on_iter) on_iter(it, f.w, f.v);
  }
  return f;
}

Matrix lccf_weights(const Matrix& x, int k_neighbors) {
  const int n = static_cast<int>(x.cols());
  if (k_neighbors < 1 || k_neighbors >= n)
    throw std::invalid_argument("lccf_weights: need 1 <= k < N");
  Vector norms = x.colwise().norm();
  if (norms.minCoeff() <= 0) throw std::invalid_argument("lccf_weights: zero-norm column");

  const Matrix d2 = detail::pairwise_sqdist(x);
  const auto nbrs = detail::knn_from_sqdist(d2, k_neighbors, /*include_ties=*/true);

  Matrix s = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j : nbrs[i]) {
      const double cs = x.col(i).dot(x.col(j)) / (norms(i) * norms(j));
      s(i, j) = cs;
      s(j, i) = cs;  // OR rule: either endpoint's neighborhood makes the edge
    }
  s.diagonal().setZero();
  return s;
}

CfFactors lccf_fit(const Matrix& k, const Matrix& s, double lambda, int rank, int iters,
                   std::uint64_t seed, double eps_div, const IterCallback& on_iter) {
  check_kernel(k);
  if (s.rows() != k.rows() || s.cols() != k.cols())
    throw std::invalid_argument("lccf: weight matrix shape mismatch");
  if (lambda < 0) throw std::invalid_argument("lccf: lambda must be >= 0");
  if (rank < 1 || iters < 1) throw std::invalid_argument("lccf: rank and iters must be >= 1");

  const Vector deg = s.rowwise().sum();

  Rng rng(seed);
  CfFactors f;
  f.w.resize(k.rows(), rank);
  f.v.resize(k.rows(), rank);
  fill_uniform(f.w, rng);
  fill_uniform(f.v, rng);

  for (int it = 1; it <= iters; ++it) {
    const Matrix num = k * f.w + lambda * (s * f.v);
    const Matrix den = f.v * (f.w.transpose() * (k * f.w)) + lambda * (deg.asDiagonal() * f.v);
    f.v = mu_step(f.v, num, den, eps_div);
    f.w = mu_step(f.w, k * f.v, (k * f.w) * (f.v.transpose() * f.v), eps_div);
    if (on_iter) on_iter(it, f.w, f.v);
  }
  return f;
}

CcfFactors ccf_fit(const Matrix& k, const Matrix& a, int rank, int iters, std::uint64_t seed,
                   double eps_div, const IterCallback& on_iter, const Matrix* init_basis,
                   const Matrix* init_coef) {
  check_kernel(k);
  if (a.rows() != k.rows()) throw std::invalid_argument("ccf: constraint row count mismatch");
  if (!a.allFinite()) throw std::invalid_argument("ccf: constraint has non-finite entries");
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    int ones = 0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) == 1.0)
        ++ones;
      else if (a(i, j) != 0.0)
        throw std::invalid_argument("ccf: constraint rows must be one-hot");
    }
    if (ones != 1) throw std::invalid_argument("ccf: constraint rows must be one-hot");
  }
  if (rank < 1 || iters < 1) throw std::invalid_argument("ccf: rank and iters must be >= 1");

  CcfFactors f;
  f.a = a;
  if (init_basis && init_coef) {
    f.w = *init_basis;
    f.z = *init_coef;
  } else {
    Rng rng(seed);
    f.w.resize(k.rows(), rank);
    f.z.resize(a.cols(), rank);
    fill_uniform(f.w, rng);
    fill_uniform(f.z, rng);
  }

  const Matrix ata = a.transpose() * a;
  for (int it = 1; it <= iters; ++it) {
    const Matrix kw = k * f.w;
    f.z = mu_step(f.z, a.transpose() * kw, ata * f.z * (f.w.transpose() * kw), eps_div);
    const Matrix az = a * f.z;
    f.w = mu_step(f.w, k * az, (k * f.w) * (az.transpose() * az), eps_div);
    if (on_iter) on_iter(it, f.w, f.z);
  }
  return f;
}

double nmf_objective(const Matrix& x, const NmfFactors& f) {
  return (x - f.u * f.v.transpose()).squaredNorm();
}

double cf_objective(const Matrix& k, const CfFactors& f) {
  // ||X - X W V^T||^2 through the kernel only.
  const Matrix wkw = f.w.transpose() * (k * f.w);
  const double cross = (k * f.w).cwiseProduct(f.v).sum();
  const double quad = (wkw * (f.v.transpose() * f.v)).trace();
  return k.trace() - 2.0 * cross + quad;
}

double lccf_objective(const Matrix& k, const Matrix& s, double lambda, const CfFactors& f) {
  const Vector deg = s.rowwise().sum();
  const double reg =
      (f.v.transpose() * (deg.asDiagonal() * f.v)).trace() - (f.v.transpose() * (s * f.v)).trace();
  return cf_objective(k, f) + lambda * reg;
}

double ccf_objective(const Matrix& k, const CcfFactors& f) {
  CfFactors c{f.w, f.a * f.z};
  return cf_objective(k, c);
}

}  // namespace rs2acf::baselines
