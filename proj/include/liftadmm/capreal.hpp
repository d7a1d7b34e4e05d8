#pragma once

// CAPReaL and p-CAPReaL: inertial proximal ADMM specialized to the lifted
// sparse affine phase retrieval program
//
//   min tr(X) + tau ||Y||_1 + lambda ||x||_1 (+ rho h_p(y))
//   s.t. A_op(X)/2 + A_op(Y)/2 + B x (- y) = c,  X = Y,  X PSD,
//
// with closed-form block updates, a dual stopping rule (step residual and
// biconvexity gap), and rank-one/sparse compensation post-processing.
// CAPReaL-Zero / -Jacobi / -Twisted baselines share the compensation step.

#include "liftadmm/lifting.hpp"
#include "liftadmm/multiblock.hpp"
#include "liftadmm/types.hpp"

#include <functional>
#include <optional>
#include <string>

namespace liftadmm {

struct CapRealParams {
  double tau = 1.0;
  double lambda = 1.0;
  double rho = 1.0;    // p-CAPReaL slack penalty
  double beta = 2.0;
  std::optional<CapRealEtas> etas;  // default: 0.95x the strict bounds
  Schedule schedule = Schedule::constant(0.25);
  double epsilon = 1e-2;        // step-residual tolerance
  double epsilon_tilde = 1e-5;  // biconvexity tolerance ||Y - x x^T||_F / ||x x^T||_F
  int max_iter = 1000;
  Index sparsity = 1;  // target s for the s^2-sparse compensation step
  bool literal_y_threshold = false;  // use tau*eta2/beta in the Y update instead of tau*eta3/beta
  double jacobi_gamma = 1.0;     // multiplier damping in the Jacobi stopping rule
  double twisted_relax = 1.0;    // twisted relaxation, in (0, 2)

  void validate() const;
};

/// Solver state; X, Y, Z are symmetrized after every update and X is the
/// output of a PSD projection.
struct LiftedState {
  Vector x;
  Matrix X, Y;
  Vector z;
  Matrix Z;
  Vector y;  // p-CAPReaL slack
};

/// Diagnostic hook called with (k, state) after each completed iteration.
using StateObserver = std::function<void(int, const LiftedState&)>;

struct PhaseTraceRecord {
  int k = 0;
  double stop_residual = 0.0;
  double biconvex_residual = 0.0;
  double feasibility = 0.0;  // constraint residual norm + ||X - Y||_F
  double rel_error = 0.0;    // vs ground truth when supplied, else NaN
  double snr = 0.0;          // dB, when supplied
};

struct PhaseTrace {
  std::vector<PhaseTraceRecord> records;
  void to_csv(const std::string& path) const;
};

struct CapRealResult {
  Vector x_hat;
  Matrix X_hat, Y_hat;
  Vector y_hat;  // p-CAPReaL only
  PhaseTrace trace;
  int iterations = 0;
  bool converged = false;  // dual stopping rule satisfied before max_iter
};

/// CAPReaL main loop (Steps 1-6). Starts from the all-zero state unless a
/// start state is given. Throws NumericFailure if the state leaves the finite
/// range. When ground truth is supplied the trace records relative errors.
CapRealResult capreal_run(const LiftedInstance& inst, const CapRealParams& params,
                          const std::optional<Vector>& ground_truth = std::nullopt,
                          const std::optional<LiftedState>& start = std::nullopt,
                          const StateObserver& observer = {});

enum class PNorm { kOne, kTwo, kInf };

/// y-block closed form given the assembled bracket residual
/// r = A_op(Xbar)/2 + A_op(Ybar)/2 + B xbar - ybar - c - zbar/beta.
Vector pcapreal_y_update(PNorm p, const Vector& ybar, const Vector& r,
                         const CapRealParams& params, double eta1);

/// p-CAPReaL main loop (Steps 1-7) for p in {1, 2, inf}.
CapRealResult pcapreal_run(const LiftedInstance& inst, PNorm p, const CapRealParams& params,
                           const std::optional<Vector>& ground_truth = std::nullopt,
                           const std::optional<LiftedState>& start = std::nullopt);

enum class BaselineVariant { kZero, kJacobi, kTwisted };

/// CAPReaL-Zero (the alpha == 0 path of capreal_run), CAPReaL-Jacobi and
/// CAPReaL-Twisted, each with its own printed updates and stopping rule.
CapRealResult baseline_run(BaselineVariant variant, const LiftedInstance& inst,
                           const CapRealParams& params,
                           const std::optional<Vector>& ground_truth = std::nullopt);

struct CompensateResult {
  Vector x_star;
  bool degenerate = false;  // zero X_hat and Y_hat: returns x_hat unchanged
};

/// Post-processing: rank-one estimate from X_hat, s^2-sparse rank-one
/// estimate from Y_hat (ties by smallest flat column-major index, signs
/// aligned with x_hat, + on ties), averaged as (x_hat + x_tilde + y_tilde)/3.
CompensateResult compensate(const Vector& x_hat, const SymmetricMatrix& X_hat,
                            const Matrix& Y_hat, Index s);

}  // namespace liftadmm
