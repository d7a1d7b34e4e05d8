#include "liftadmm/lifting.hpp"

#include "liftadmm/kernel.hpp"

namespace liftadmm {

Vector lift_forward(const LiftedInstance& inst, const Matrix& X) {
  require(X.rows() == inst.n() && X.cols() == inst.n(), "lift_forward: dimension mismatch");
  // a_i^T X a_i as the row-wise inner product of (A X) with A.
  return ((inst.A * X).cwiseProduct(inst.A)).rowwise().sum();
}

SymmetricMatrix lift_adjoint(const LiftedInstance& inst, const Vector& coeff) {
  require(coeff.size() == inst.m(), "lift_adjoint: dimension mismatch");
  Matrix M = inst.A.transpose() * coeff.asDiagonal() * inst.A;
  return SymmetricMatrix(M);
}

LiftedInstance build_instance(const Matrix& A, const Vector& b, const Vector& bbar) {
  require(A.rows() == b.size() && A.rows() == bbar.size(),
          "build_instance: A, b, bbar must share the measurement count");
  require_finite(A, "build_instance::A");
  require_finite(b, "build_instance::b");
  require_finite(bbar, "build_instance::bbar");

  LiftedInstance inst;
  inst.A = A;
  inst.b = b;
  inst.bbar = bbar;
  inst.B = 2.0 * b.asDiagonal() * A;
  inst.c = bbar - b.cwiseAbs2();
  inst.norm_BtB = [&] {
    const double s = spectral_norm(inst.B);
    return s * s;
  }();
  inst.norm_AA4 = operator_norm(
      [&inst](const Matrix& W) -> Matrix {
        return lift_adjoint(inst, lift_forward(inst, W)).mat() + 4.0 * W;
      },
      inst.n());
  return inst;
}

CapRealEtas default_etas(const LiftedInstance& inst, LiftedVariant variant) {
  constexpr double kSafety = 0.95;
  CapRealEtas e;
  if (variant == LiftedVariant::kCapReal) {
    require(inst.norm_BtB > 0.0 && inst.norm_AA4 > 0.0,
            "default_etas: degenerate instance (zero operator norm)");
    e.eta1 = kSafety / inst.norm_BtB;
    e.eta2 = e.eta3 = kSafety * 2.0 / inst.norm_AA4;
  } else {
    require(inst.norm_BtB > 0.0 && inst.norm_AA4 > 0.0,
            "default_etas: degenerate instance (zero operator norm)");
    e.eta1 = kSafety;
    e.eta2 = e.eta3 = kSafety * 4.0 / (3.0 * inst.norm_AA4);
    e.eta4 = kSafety / (3.0 * inst.norm_BtB);
  }
  return e;
}

namespace {

/// Dense m x n^2 matrix of the lifting map acting on vec(X) (column-major).
Matrix dense_lift_map(const LiftedInstance& inst) {
  const Index m = inst.m(), n = inst.n();
  Matrix M(m, n * n);
  for (Index i = 0; i < m; ++i) {
    const Matrix outer = inst.A.row(i).transpose() * inst.A.row(i);
    M.row(i) = Eigen::Map<const Vector>(outer.data(), n * n).transpose();
  }
  return M;
}

}  // namespace

BlockProblem induced_block_problem(const LiftedInstance& inst, LiftedVariant variant,
                                   double tau, double lambda, double rho) {
  const Index m = inst.m(), n = inst.n();
  const Matrix lift = dense_lift_map(inst);
  const Matrix In2 = Matrix::Identity(n * n, n * n);

  // Column blocks of the stacked constraint [measurement row; X - Y row].
  Matrix A_X(m + n * n, n * n), A_Y(m + n * n, n * n), A_x(m + n * n, n);
  A_X << 0.5 * lift, In2;
  A_Y << 0.5 * lift, -In2;
  A_x << inst.B, Matrix::Zero(n * n, n);

  BlockProblem p;
  if (variant == LiftedVariant::kCapReal) {
    p.blocks.push_back({A_x, BlockObjective::l1(lambda)});
    p.blocks.push_back({A_X, BlockObjective::trace_psd(n)});
    p.blocks.push_back({A_Y, BlockObjective::l1(tau)});
  } else {
    Matrix A_y(m + n * n, m);
    A_y << -Matrix::Identity(m, m), Matrix::Zero(n * n, m);
    p.blocks.push_back({A_y, BlockObjective::lp(2, rho)});
    p.blocks.push_back({A_X, BlockObjective::trace_psd(n)});
    p.blocks.push_back({A_Y, BlockObjective::l1(tau)});
    p.blocks.push_back({A_x, BlockObjective::l1(lambda)});
  }
  p.c = Vector::Zero(m + n * n);
  p.c.head(m) = inst.c;
  return p;
}

std::vector<HSpec> induced_h_specs(const LiftedInstance& inst, LiftedVariant variant,
                                   const CapRealEtas& etas) {
  (void)inst;
  std::vector<HSpec> h;
  if (variant == LiftedVariant::kCapReal) {
    h = {HSpec::prox_linear(etas.eta1), HSpec::prox_linear(etas.eta2),
         HSpec::prox_linear(etas.eta3)};
  } else {
    h = {HSpec::prox_linear(etas.eta1), HSpec::prox_linear(etas.eta2),
         HSpec::prox_linear(etas.eta3), HSpec::prox_linear(etas.eta4)};
  }
  return h;
}

}  // namespace liftadmm
