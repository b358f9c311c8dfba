#include "rs2acf/solver.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "rs2acf/graphs.hpp"
#include "rs2acf/l21.hpp"
#include "rs2acf/rng.hpp"

namespace rs2acf::solver {

namespace {

Matrix onehot_rows(const std::vector<int>& labels, int num_classes) {
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), num_classes);
  for (size_t i = 0; i < labels.size(); ++i) a(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  return a;
}

// factor <- factor .* grad_neg ./ grad_pos, the general multiplicative rule
// with the gradient split into entrywise nonnegative parts. Fixed points are
// exactly the KKT stationary points of the underlying subproblem.
Matrix mu_step(const Matrix& cur, const Matrix& grad_neg, const Matrix& grad_pos, double eps) {
  return (cur.array() * grad_neg.array() / grad_pos.array().max(eps)).matrix();
}

Matrix pos(const Matrix& m) { return m.cwiseMax(0.0); }
Matrix neg(const Matrix& m) { return (-m).cwiseMax(0.0); }

int effective_rank(const Dataset& ds, const HyperParams& hp) {
  return hp.rank > 0 ? hp.rank : ds.num_classes + 1;
}

// H = (I - Q)(I - Q)^T
Matrix locality_matrix(const Matrix& q) {
  Matrix iq = Matrix::Identity(q.rows(), q.cols()) - q;
  return iq * iq.transpose();
}

}  // namespace

std::pair<FactorState, LabelConstraint> init_state(const Dataset& ds, const HyperParams& hp) {
  ds.validate();
  hp.validate();
  const int c = ds.num_classes;
  const int d = ds.dim(), n = ds.size();
  const int r = effective_rank(ds, hp);

  LabelConstraint lc;
  lc.a_l = onehot_rows(ds.labels, c);

  // Ridge initialization of the predictor from the labeled block; the
  // identity shift keeps the system nonsingular for any X_L.
  const Matrix x_l = ds.x_labeled();
  Matrix sys = x_l * x_l.transpose();
  sys.diagonal().array() += 1.0;
  Matrix p = sys.ldlt().solve(x_l * lc.a_l);
  if (!p.allFinite()) throw std::runtime_error("init_state: predictor solve failed");

  // Indicator for unlabeled samples from the predictions, clamped onto the
  // nonnegative orthant the multiplicative update needs.
  lc.a_u = (ds.x_unlabeled().transpose() * p).cwiseMax(0.0);

  FactorState st;
  st.p = p;
  st.q = graphs::cosine_weights(ds.x);
  Rng rng(hp.seed);
  st.w.resize(n, r);
  st.z_l.resize(c, r);
  st.z_u.resize(c, r);
  fill_uniform(st.w, rng);
  fill_uniform(st.z_l, rng);
  fill_uniform(st.z_u, rng);
  st.e = Matrix::Zero(d, n);
  st.s_diag = Vector::Ones(n);
  st.b_diag = Vector::Ones(d);

  st.validate();
  lc.validate();
  return {std::move(st), std::move(lc)};
}

ObjectiveTerms objective_terms(const Dataset& ds, const HyperParams& hp, const FactorState& st,
                               const LabelConstraint& lc) {
  const Matrix rep = lc.az(st.z_l, st.z_u);           // N x r
  const Matrix vt = rep.transpose();                  // r x N
  const Matrix px = st.p.transpose() * ds.x;          // c x N

  ObjectiveTerms t;
  t.reconstruction = (ds.x - st.e - ds.x * (st.w * vt)).squaredNorm();
  t.sparsity = hp.gamma * l21_columns(st.e);
  t.adaptive = hp.alpha * ((ds.x - ds.x * st.q).squaredNorm() + (vt - vt * st.q).squaredNorm() +
                           (px - px * st.q).squaredNorm());
  t.label = hp.beta * ((lc.a_l - ds.x_labeled().transpose() * st.p).squaredNorm() +
                       (lc.a_u - ds.x_unlabeled().transpose() * st.p).squaredNorm() +
                       l21_rows(st.p));
  return t;
}

double objective(const Dataset& ds, const HyperParams& hp, const FactorState& st,
                 const LabelConstraint& lc) {
  return objective_terms(ds, hp, st, lc).total();
}

Matrix update_w(const Dataset& ds, const FactorState& st, const LabelConstraint& lc,
                double eps_div) {
  const Matrix rep = lc.az(st.z_l, st.z_u);
  const Matrix t = ds.x.transpose() * (ds.x - st.e);  // error-adjusted kernel
  const Matrix k = ds.x.transpose() * ds.x;
  const Matrix gram = rep.transpose() * rep;

  // Sign-indefinite kernels are split across the ratio so both sides stay
  // nonnegative; for nonnegative data the negative parts vanish and this is
  // the classic ratio rule.
  const Matrix grad_neg = pos(t) * rep + (neg(k) * st.w) * gram;
  const Matrix grad_pos = (pos(k) * st.w) * gram + neg(t) * rep;
  return mu_step(st.w, grad_neg, grad_pos, eps_div);
}

ZUpdate update_z_and_au(const Dataset& ds, const FactorState& st, const LabelConstraint& lc,
                        const HyperParams& hp) {
  const int l = ds.num_labeled, u = ds.num_unlabeled();

  const Matrix x_l = ds.x_labeled();
  const Matrix x_u = ds.x_unlabeled();
  const Matrix e_l = st.e.leftCols(l);
  const Matrix e_u = st.e.rightCols(u);

  // Full reconstruction basis, shared by the labeled and unlabeled halves of
  // the column-split residual.
  const Matrix basis = ds.x * st.w;                  // D x r
  const Matrix bgram = basis.transpose() * basis;    // r x r
  const Matrix bg_pos = pos(bgram), bg_neg = neg(bgram);

  const Matrix h = locality_matrix(st.q);
  const auto h_ll = h.topLeftCorner(l, l);
  const auto h_lu = h.topRightCorner(l, u);
  const auto h_ul = h.bottomLeftCorner(u, l);
  const auto h_uu = h.bottomRightCorner(u, u);

  const Matrix atl = lc.a_l.transpose() * lc.a_l;
  const Matrix atu = lc.a_u.transpose() * lc.a_u;

  ZUpdate out;

  // Sign-indefinite pieces (locality blocks, error-adjusted kernels, the
  // basis gram on real data) are split across the ratio; for nonnegative
  // inputs the negative parts vanish. The three blocks run Gauss-Seidel
  // style, each seeing the previous result.
  {
    const Matrix t_l = lc.a_l.transpose() * ((x_l - e_l).transpose() * basis);
    const Matrix alz = lc.a_l * st.z_l;
    const Matrix auz = lc.a_u * st.z_u;
    const Matrix o_pos = lc.a_l.transpose() * (pos(h_ll) * alz + pos(h_lu) * auz);
    const Matrix o_neg = lc.a_l.transpose() * (neg(h_ll) * alz + neg(h_lu) * auz);
    const Matrix grad_neg = pos(t_l) + atl * st.z_l * bg_neg + hp.alpha * o_neg;
    const Matrix grad_pos = atl * st.z_l * bg_pos + neg(t_l) + hp.alpha * o_pos;
    out.z_l = mu_step(st.z_l, grad_neg, grad_pos, hp.eps_div);
  }

  {
    const Matrix t_u = lc.a_u.transpose() * ((x_u - e_u).transpose() * basis);
    const Matrix alz = lc.a_l * out.z_l;
    const Matrix auz = lc.a_u * st.z_u;
    const Matrix o_pos = lc.a_u.transpose() * (pos(h_uu) * auz + pos(h_ul) * alz);
    const Matrix o_neg = lc.a_u.transpose() * (neg(h_uu) * auz + neg(h_ul) * alz);
    const Matrix grad_neg = pos(t_u) + atu * st.z_u * bg_neg + hp.alpha * o_neg;
    const Matrix grad_pos = atu * st.z_u * bg_pos + neg(t_u) + hp.alpha * o_pos;
    out.z_u = mu_step(st.z_u, grad_neg, grad_pos, hp.eps_div);
  }

  {
    // Indicator step: label predictions pull A_U toward X_U^T P while the
    // factorization and locality terms anchor it.
    const Matrix c_au = (x_u - e_u).transpose() * (basis * out.z_u.transpose());
    const Matrix xup = x_u.transpose() * st.p;
    const Matrix zgz = out.z_u * bgram * out.z_u.transpose();  // c x c
    const Matrix alz = lc.a_l * out.z_l;
    const Matrix auz = lc.a_u * out.z_u;
    const Matrix gl_pos = (pos(h_uu) * auz + pos(h_ul) * alz) * out.z_u.transpose();
    const Matrix gl_neg = (neg(h_uu) * auz + neg(h_ul) * alz) * out.z_u.transpose();
    const Matrix grad_neg = hp.beta * pos(xup) + pos(c_au) + lc.a_u * neg(zgz) +
                            hp.alpha * gl_neg;
    const Matrix grad_pos = lc.a_u * pos(zgz) + neg(c_au) + hp.alpha * gl_pos +
                            hp.beta * lc.a_u + hp.beta * neg(xup);
    out.a_u = mu_step(lc.a_u, grad_neg, grad_pos, hp.eps_div);
  }

  return out;
}

Matrix update_e(const Dataset& ds, const FactorState& st, const LabelConstraint& lc,
                double gamma) {
  if ((st.s_diag.array() <= 0).any())
    throw std::invalid_argument("update_e: s_diag must be positive");
  const Matrix rep = lc.az(st.z_l, st.z_u);
  const Matrix residual = ds.x - ds.x * (st.w * rep.transpose());
  // (I + gamma * S)^{-1} is per-column scaling since S is diagonal.
  Matrix e = residual;
  for (Eigen::Index j = 0; j < e.cols(); ++j) e.col(j) /= 1.0 + gamma * st.s_diag(j);

#ifndef NDEBUG
  // Stationarity of the reweighted subproblem at the closed form.
  {
    Matrix grad = -2.0 * (residual - e) + 2.0 * gamma * (e * st.s_diag.asDiagonal());
    assert(grad.norm() <= 1e-8 * (1.0 + residual.norm()) * (1.0 + gamma));
  }
#endif
  return e;
}

Matrix update_q(const Dataset& ds, const FactorState& st, const LabelConstraint& lc, double alpha,
                double eps_div) {
  // With alpha == 0 the subproblem is vacuous and the rule degenerates to
  // 0/0; leave Q untouched.
  if (alpha == 0.0) return st.q;

  const Matrix rep = lc.az(st.z_l, st.z_u);
  const Matrix px = st.p.transpose() * ds.x;
  // Y^T Y for the stacked target [X; (AZ)^T; P^T X], all scaled by alpha.
  const Matrix gram =
      alpha * (ds.x.transpose() * ds.x + rep * rep.transpose() + px.transpose() * px);
  const Matrix gp = pos(gram), gn = neg(gram);

  Matrix q = mu_step(st.q, gp + gn * st.q, gp * st.q + gn, eps_div);
  q.diagonal().setZero();
  return q;
}

Matrix update_p(const Dataset& ds, const FactorState& st, const LabelConstraint& lc, double alpha,
                double beta) {
  // With beta == 0 the normal equations lose their right-hand side and the
  // remaining objective does not depend on P.
  if (beta == 0.0) return st.p;
  if ((st.b_diag.array() <= 0).any())
    throw std::invalid_argument("update_p: b_diag must be positive");

  const Matrix x_l = ds.x_labeled();
  const Matrix x_u = ds.x_unlabeled();
  const Matrix h = locality_matrix(st.q);

  Matrix sys = alpha * (ds.x * (h * ds.x.transpose()));
  sys += beta * (x_l * x_l.transpose());
  sys += beta * (x_u * x_u.transpose());
  sys += (beta * st.b_diag).asDiagonal();
  const Matrix rhs = beta * (x_l * lc.a_l + x_u * lc.a_u);

  Matrix p = sys.ldlt().solve(rhs);
  const double scale = sys.norm() * p.norm() + rhs.norm();
  if (!p.allFinite() || (sys * p - rhs).norm() > 1e-8 * (1.0 + scale)) {
    Eigen::FullPivLU<Matrix> lu(sys);
    if (!lu.isInvertible()) throw std::runtime_error("update_p: singular predictor system");
    p = lu.solve(rhs);
    if (!p.allFinite()) throw std::runtime_error("update_p: predictor solve failed");
  }
  return p;
}

std::pair<Vector, Vector> update_diagonals(const FactorState& st, double eps_norm) {
  return {reweight_cols(st.e, eps_norm), reweight_rows(st.p, eps_norm)};
}

FitResult fit(const Dataset& ds, const HyperParams& hp, const IterCallback& on_iter) {
  ds.validate();
  hp.validate();
  HyperParams cfg = hp;
  cfg.rank = effective_rank(ds, hp);

  auto [st, lc] = init_state(ds, cfg);
  double prev = objective(ds, cfg, st, lc);

  ConvergenceTrace trace;
  trace.objective_values.reserve(cfg.max_iter);

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    ZUpdate zu = update_z_and_au(ds, st, lc, cfg);
    st.z_l = std::move(zu.z_l);
    st.z_u = std::move(zu.z_u);
    lc.a_u = std::move(zu.a_u);
    st.p = update_p(ds, st, lc, cfg.alpha, cfg.beta);
    st.w = update_w(ds, st, lc, cfg.eps_div);
    if (!cfg.freeze_e) st.e = update_e(ds, st, lc, cfg.gamma);
    if (!cfg.freeze_q) st.q = update_q(ds, st, lc, cfg.alpha, cfg.eps_div);
    auto diags = update_diagonals(st, cfg.eps_norm);
    st.s_diag = std::move(diags.first);
    st.b_diag = std::move(diags.second);

    st.validate();  // nonnegativity and finiteness after every sweep

    const double obj = objective(ds, cfg, st, lc);
    trace.objective_values.push_back(obj);
    if (on_iter) on_iter(iter, st, lc);

    if (std::abs(prev - obj) <= cfg.tol) break;
    prev = obj;
  }

  FitResult res;
  res.representation = lc.az(st.z_l, st.z_u);
  res.lc = std::move(lc);
  res.state = std::move(st);
  res.trace = std::move(trace);
  return res;
}

std::vector<int> predict_labels(const Matrix& p, const Matrix& x_u) {
  if (p.rows() != x_u.rows()) throw std::invalid_argument("predict_labels: shape mismatch");
  const Matrix scores = x_u.transpose() * p;  // u x c
  std::vector<int> labels(scores.rows());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    int best = 0;
    for (Eigen::Index j = 1; j < scores.cols(); ++j)
      if (scores(i, j) > scores(i, best)) best = static_cast<int>(j);
    labels[i] = best;
  }
  return labels;
}

}  // namespace rs2acf::solver
