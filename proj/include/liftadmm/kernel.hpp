#pragma once

// Dense real linear-algebra and proximal primitives shared by the solvers.
// All operations are pure functions on immutable inputs; no shared state.

#include "liftadmm/types.hpp"

#include <functional>
#include <utility>

namespace liftadmm {

/// Entrywise soft thresholding: sgn(v_i) (|v_i| - r)_+ .
Vector soft_threshold(const Vector& v, double r);
Matrix soft_threshold(const Matrix& v, double r);

/// Nearest (Frobenius) PSD matrix: eigendecompose and clip negative
/// eigenvalues to exactly zero.
SymmetricMatrix psd_project(const SymmetricMatrix& m);

/// Euclidean projection onto the l1 ball of radius r (sort-based, O(m log m)).
Vector l1_ball_project(const Vector& v, double r);

/// prox of r ||.||_inf via the Moreau identity  v - P_{r B1}(v).
Vector linf_prox(const Vector& v, double r);

struct EigPair {
  double value = 0.0;
  Vector vector;
  bool degenerate = false;  // all-zero input
};

/// Eigenpair of largest algebraic eigenvalue. The vector has unit 2-norm and
/// its largest-magnitude entry is nonnegative. Zero matrix returns (0, e1)
/// flagged degenerate.
EigPair top_eigpair(const SymmetricMatrix& m);

/// Eigenpair of largest-magnitude eigenvalue, same sign convention.
EigPair top_abs_eigpair(const SymmetricMatrix& m);

struct PowerIterOptions {
  double rel_tol = 1e-8;
  int max_iters = 1000;
  std::uint64_t seed = 0x5eed;
};

/// ||A||_{2->2} via power iteration on A^T A.
double spectral_norm(const Matrix& a, const PowerIterOptions& opt = {});

/// Matrix-space linear operator for ||.||_{F->F} estimation.
using MatrixOp = std::function<Matrix(const Matrix&)>;

/// Induced F->F norm of a symmetric PSD operator on n x n matrices,
/// by power iteration on the operator itself.
double operator_norm(const MatrixOp& op, Index n, const PowerIterOptions& opt = {});

/// sqrt(u^T W u); tiny negative quadratic forms (> -1e-12 ||u||^2) clamp to 0.
double weighted_norm(const Vector& u, const SemiNormWeight& w);

}  // namespace liftadmm
