#pragma once

// Lifting of affine quadratic measurements |a_i^T x + b_i|^2 into linear
// measurements of (X, x) with X standing in for x x^T:
//   bbar = A_op(X) + B x + |b|^2,   A_op(X)_i = a_i^T X a_i,
//   B = 2 [b_1 a_1, ..., b_m a_m]^T,   c = bbar - |b|^2.

#include "liftadmm/multiblock.hpp"
#include "liftadmm/types.hpp"

namespace liftadmm {

struct LiftedInstance {
  Matrix A;   // m x n measurement rows a_i^T
  Vector b;   // reference
  Vector bbar;  // measured data (possibly noisy)
  Matrix B;   // 2 diag(b) A
  Vector c;   // bbar - |b|^2
  double norm_BtB = 0.0;     // ||B^T B||_{2->2}
  double norm_AA4 = 0.0;     // ||A_op* A_op + 4 I||_{F->F}

  Index m() const { return A.rows(); }
  Index n() const { return A.cols(); }
};

/// Component i = a_i^T X a_i.
Vector lift_forward(const LiftedInstance& inst, const Matrix& X);

/// Adjoint: sum_j c_j a_j a_j^T, symmetric by construction.
SymmetricMatrix lift_adjoint(const LiftedInstance& inst, const Vector& coeff);

/// Build B, c and the cached operator norms.
LiftedInstance build_instance(const Matrix& A, const Vector& b, const Vector& bbar);

struct CapRealEtas {
  double eta1 = 0.0;
  double eta2 = 0.0;
  double eta3 = 0.0;
  double eta4 = 0.0;  // p-CAPReaL only
};

enum class LiftedVariant { kCapReal, kPCapReal };

/// Each eta at 0.95x its strict upper bound; the safety factor absorbs
/// power-iteration estimation error in the cached norms.
CapRealEtas default_etas(const LiftedInstance& inst, LiftedVariant variant);

/// Dense materialization of the lifted program as a generic BlockProblem
/// (3 blocks noiseless, 4 with the slack block), for assumption checks and
/// cross-validation at small n. Blocks are ordered as in the solvers:
/// noiseless (x, X, Y), slack variant (y, X, Y, x).
BlockProblem induced_block_problem(const LiftedInstance& inst, LiftedVariant variant,
                                   double tau, double lambda, double rho);

/// H specs matching default_etas for the induced problem, same block order.
std::vector<HSpec> induced_h_specs(const LiftedInstance& inst, LiftedVariant variant,
                                   const CapRealEtas& etas);

}  // namespace liftadmm
