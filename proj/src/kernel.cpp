#include "liftadmm/kernel.hpp"

#include "liftadmm/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace liftadmm {

SemiNormWeight::SemiNormWeight(const SymmetricMatrix& w) : w_(w) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(w_.mat(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericFailure("SemiNormWeight: eigensolver did not converge");
  min_eig_ = w_.n() > 0 ? es.eigenvalues().minCoeff() : 0.0;
  const double scale = w_.n() > 0 ? std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()) : 1.0;
  require(min_eig_ >= -1e-10 * scale, "SemiNormWeight: W is not positive semidefinite");
}

double SemiNormWeight::inner(const Vector& u, const Vector& v) const {
  require(u.size() == n() && v.size() == n(), "SemiNormWeight::inner: dimension mismatch");
  return u.dot(w_.mat() * v);
}

double SemiNormWeight::norm(const Vector& u) const {
  require(u.size() == n(), "SemiNormWeight::norm: dimension mismatch");
  double q = u.dot(w_.mat() * u);
  const double floor = -1e-12 * u.squaredNorm();
  if (q < 0.0) {
    if (q < floor) throw NumericFailure("SemiNormWeight::norm: quadratic form is negative");
    q = 0.0;
  }
  return std::sqrt(q);
}

namespace {

template <typename Derived>
void soft_threshold_inplace(Eigen::MatrixBase<Derived>& out, double r) {
  out = out.unaryExpr([r](double t) {
    const double a = std::abs(t) - r;
    return a > 0.0 ? (t > 0.0 ? a : -a) : 0.0;
  });
}

}  // namespace

Vector soft_threshold(const Vector& v, double r) {
  require(r >= 0.0, "soft_threshold: threshold must be nonnegative");
  require_finite(v, "soft_threshold");
  Vector out = v;
  soft_threshold_inplace(out, r);
  return out;
}

Matrix soft_threshold(const Matrix& v, double r) {
  require(r >= 0.0, "soft_threshold: threshold must be nonnegative");
  require_finite(v, "soft_threshold");
  Matrix out = v;
  soft_threshold_inplace(out, r);
  return out;
}

SymmetricMatrix psd_project(const SymmetricMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
  if (es.info() != Eigen::Success)
    throw NumericFailure("psd_project: eigensolver did not converge after " +
                         std::to_string(30 * m.n()) + " implicit QR sweeps");
  Vector lam = es.eigenvalues().cwiseMax(0.0);
  Matrix out = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  return SymmetricMatrix(out);
}

Vector l1_ball_project(const Vector& v, double r) {
  require(r >= 0.0, "l1_ball_project: radius must be nonnegative");
  require_finite(v, "l1_ball_project");
  if (r == 0.0) return Vector::Zero(v.size());
  if (v.lpNorm<1>() <= r) return v;
  // Sort |v| descending, find the largest rho with u_rho > (sum_{i<=rho} u_i - r)/rho.
  Vector a = v.cwiseAbs();
  std::vector<double> u(a.data(), a.data() + a.size());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double cand = (cumsum - r) / static_cast<double>(j + 1);
    if (u[j] - cand > 0.0) theta = cand;
  }
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double shrunk = std::max(std::abs(v[i]) - theta, 0.0);
    out[i] = (v[i] >= 0.0 ? 1.0 : -1.0) * shrunk;
  }
  return out;
}

Vector linf_prox(const Vector& v, double r) {
  require(r >= 0.0, "linf_prox: threshold must be nonnegative");
  require_finite(v, "linf_prox");
  return v - l1_ball_project(v, r);
}

namespace {

EigPair eigpair_with_sign(double value, Vector vec) {
  Index imax = 0;
  vec.cwiseAbs().maxCoeff(&imax);
  if (vec[imax] < 0.0) vec = -vec;  // ties keep +
  return {value, std::move(vec), false};
}

}  // namespace

EigPair top_eigpair(const SymmetricMatrix& m) {
  require(m.n() >= 1, "top_eigpair: empty matrix");
  if (m.mat().isZero(0.0)) {
    EigPair p;
    p.vector = Vector::Unit(m.n(), 0);
    p.degenerate = true;
    return p;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
  if (es.info() != Eigen::Success)
    throw NumericFailure("top_eigpair: eigensolver did not converge");
  const Index last = m.n() - 1;
  return eigpair_with_sign(es.eigenvalues()[last], es.eigenvectors().col(last));
}

EigPair top_abs_eigpair(const SymmetricMatrix& m) {
  require(m.n() >= 1, "top_abs_eigpair: empty matrix");
  if (m.mat().isZero(0.0)) {
    EigPair p;
    p.vector = Vector::Unit(m.n(), 0);
    p.degenerate = true;
    return p;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
  if (es.info() != Eigen::Success)
    throw NumericFailure("top_abs_eigpair: eigensolver did not converge");
  Index imax = 0;
  es.eigenvalues().cwiseAbs().maxCoeff(&imax);
  return eigpair_with_sign(es.eigenvalues()[imax], es.eigenvectors().col(imax));
}

double spectral_norm(const Matrix& a, const PowerIterOptions& opt) {
  require_finite(a, "spectral_norm");
  if (a.size() == 0 || a.isZero(0.0)) return 0.0;
  Philox rng(opt.seed, /*stream=*/0);
  Vector v(a.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] = rng.uniform() - 0.5;
  if (v.norm() == 0.0) v.setOnes();
  v.normalize();
  double lam = 0.0;
  for (int it = 0; it < opt.max_iters; ++it) {
    Vector w = a.transpose() * (a * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    w /= nw;
    const double lam_new = (a * w).squaredNorm();
    const bool done = std::abs(lam_new - lam) <= opt.rel_tol * std::max(lam_new, 1e-300);
    lam = lam_new;
    v = std::move(w);
    if (done) break;
  }
  return std::sqrt(lam);
}

double operator_norm(const MatrixOp& op, Index n, const PowerIterOptions& opt) {
  require(n >= 1, "operator_norm: dimension must be positive");
  Philox rng(opt.seed, /*stream=*/1);
  Matrix w(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) w(i, j) = rng.uniform() - 0.5;
  w = symmetrize(w);
  double nw = w.norm();
  if (nw == 0.0) w.setIdentity(), nw = w.norm();
  w /= nw;
  double lam = 0.0;
  for (int it = 0; it < opt.max_iters; ++it) {
    Matrix w2 = op(w);
    require_finite(w2, "operator_norm");
    const double n2 = w2.norm();
    if (n2 == 0.0) return 0.0;
    w2 /= n2;
    const bool done = std::abs(n2 - lam) <= opt.rel_tol * std::max(n2, 1e-300);
    lam = n2;
    w = std::move(w2);
    if (done) break;
  }
  return lam;
}

double weighted_norm(const Vector& u, const SemiNormWeight& w) {
  return w.norm(u);
}

}  // namespace liftadmm
