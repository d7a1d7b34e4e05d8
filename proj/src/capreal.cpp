#include "liftadmm/capreal.hpp"

#include "liftadmm/kernel.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

namespace liftadmm {

namespace {

constexpr double kDivergenceGuard = 1e12;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double snr_db(double rel_error) {
  if (rel_error <= 0.0) return 300.0;  // capped sentinel for exact recovery
  return -20.0 * std::log10(rel_error);
}

/// ||Y - x x^T||_F / ||x x^T||_F with the 0/0 convention: 0 when Y is also
/// zero, +inf otherwise.
double biconvex_ratio(const Matrix& Y, const Vector& x) {
  const double nxx = x.squaredNorm();  // ||x x^T||_F = ||x||^2
  if (nxx == 0.0)
    return Y.isZero(0.0) ? 0.0 : std::numeric_limits<double>::infinity();
  return (Y - x * x.transpose()).norm() / nxx;
}

void check_finite_state(double sq, int k, const char* who) {
  if (!std::isfinite(sq))
    throw NumericFailure(std::string(who) + ": non-finite state at k=" + std::to_string(k));
  if (sq > kDivergenceGuard * kDivergenceGuard)
    throw NumericFailure(std::string(who) + ": state norm exceeded divergence guard 1e12 at k=" +
                         std::to_string(k));
}

struct StateDelta {
  Vector dx, dy, dz;
  Matrix dX, dY, dZ;
};

}  // namespace

void CapRealParams::validate() const {
  require(tau > 0.0 && lambda > 0.0 && rho > 0.0, "CapRealParams: tau, lambda, rho must be positive");
  require(beta > 0.0, "CapRealParams: beta must be positive");
  require(epsilon > 0.0 && epsilon_tilde > 0.0, "CapRealParams: tolerances must be positive");
  require(max_iter >= 1, "CapRealParams: max_iter must be positive");
  require(sparsity >= 1, "CapRealParams: sparsity must be at least 1");
  require(twisted_relax > 0.0 && twisted_relax < 2.0,
          "CapRealParams: twisted relaxation must lie in (0, 2)");
  require(jacobi_gamma > 0.0, "CapRealParams: jacobi gamma must be positive");
}

void PhaseTrace::to_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("PhaseTrace::to_csv: cannot open " + path);
  out << "k,stop_residual,biconvex_residual,feasibility,rel_error,snr\n";
  out.precision(17);
  for (const auto& r : records)
    out << r.k << ',' << r.stop_residual << ',' << r.biconvex_residual << ',' << r.feasibility
        << ',' << r.rel_error << ',' << r.snr << '\n';
}

namespace {

void validate_etas_capreal(const LiftedInstance& inst, const CapRealEtas& e) {
  require(e.eta1 > 0.0 && e.eta1 < 1.0 / inst.norm_BtB,
          "CAPReaL: eta1 must lie in (0, ||B^T B||^-1)");
  require(e.eta2 > 0.0 && e.eta2 < 2.0 / inst.norm_AA4 && e.eta3 > 0.0 &&
              e.eta3 < 2.0 / inst.norm_AA4,
          "CAPReaL: eta2, eta3 must lie in (0, 2 ||A*A + 4I||^-1)");
}

void validate_etas_pcapreal(const LiftedInstance& inst, const CapRealEtas& e) {
  require(e.eta1 > 0.0 && e.eta1 < 1.0, "p-CAPReaL: eta1 must lie in (0, 1)");
  require(e.eta2 > 0.0 && e.eta2 < 4.0 / (3.0 * inst.norm_AA4) && e.eta3 > 0.0 &&
              e.eta3 < 4.0 / (3.0 * inst.norm_AA4),
          "p-CAPReaL: eta2, eta3 must lie in (0, 4/(3 ||A*A + 4I||))");
  require(e.eta4 > 0.0 && e.eta4 < 1.0 / (3.0 * inst.norm_BtB),
          "p-CAPReaL: eta4 must lie in (0, 1/(3 ||B^T B||))");
}

/// G-seminorm of a state increment for the 3-block program (blocks x; X, Y
/// with the stacked multiplier (z, Z)); drives the adaptive schedule.
double capreal_g_quad(const LiftedInstance& inst, const CapRealEtas& e, double beta,
                      const StateDelta& d) {
  const Vector v1 = 0.5 * lift_forward(inst, d.dX) + 0.5 * lift_forward(inst, d.dY);
  const Matrix v2 = d.dX - d.dY;
  double q = (beta / e.eta1) * d.dx.squaredNorm() - beta * (inst.B * d.dx).squaredNorm();
  q += (beta / e.eta2) * d.dX.squaredNorm() + (beta / e.eta3) * d.dY.squaredNorm();
  q += beta * (v1 - d.dz / beta).squaredNorm() - beta * v1.squaredNorm();
  q += beta * (v2 - d.dZ / beta).squaredNorm() - beta * v2.squaredNorm();
  return std::max(q, 0.0);
}

double pcapreal_g_quad(const LiftedInstance& inst, const CapRealEtas& e, double beta,
                       const StateDelta& d) {
  const Vector v1 =
      0.5 * lift_forward(inst, d.dX) + 0.5 * lift_forward(inst, d.dY) + inst.B * d.dx;
  const Matrix v2 = d.dX - d.dY;
  double q = beta * (1.0 / e.eta1 - 1.0) * d.dy.squaredNorm();
  q += (beta / e.eta2) * d.dX.squaredNorm() + (beta / e.eta3) * d.dY.squaredNorm() +
       (beta / e.eta4) * d.dx.squaredNorm();
  q += beta * (v1 - d.dz / beta).squaredNorm() - beta * v1.squaredNorm();
  q += beta * (v2 - d.dZ / beta).squaredNorm() - beta * v2.squaredNorm();
  return std::max(q, 0.0);
}

double schedule_alpha(const Schedule& s, int k, double gnorm_delta) {
  if (s.kind == ScheduleKind::kAdaptive) {
    if (k == 0 || gnorm_delta == 0.0) return 1.0 / 3.0;
    const double t = static_cast<double>(k) * gnorm_delta;
    return std::min(1.0 / 3.0, 1.0 / (t * t));
  }
  Trace empty;
  return step_size(s, k, empty);
}

LiftedState zero_state(const LiftedInstance& inst) {
  LiftedState s;
  s.x = Vector::Zero(inst.n());
  s.X = Matrix::Zero(inst.n(), inst.n());
  s.Y = Matrix::Zero(inst.n(), inst.n());
  s.z = Vector::Zero(inst.m());
  s.Z = Matrix::Zero(inst.n(), inst.n());
  s.y = Vector::Zero(inst.m());
  return s;
}

PhaseTraceRecord make_record(int k, double res, double bic, double feas,
                             const std::optional<Vector>& truth, const Vector& x) {
  PhaseTraceRecord r;
  r.k = k;
  r.stop_residual = res;
  r.biconvex_residual = bic;
  r.feasibility = feas;
  if (truth) {
    r.rel_error = (x - *truth).norm() / truth->norm();
    r.snr = snr_db(r.rel_error);
  } else {
    r.rel_error = kNaN;
    r.snr = kNaN;
  }
  return r;
}

}  // namespace

CapRealResult capreal_run(const LiftedInstance& inst, const CapRealParams& params,
                          const std::optional<Vector>& ground_truth,
                          const std::optional<LiftedState>& start,
                          const StateObserver& observer) {
  params.validate();
  const CapRealEtas e = params.etas.value_or(default_etas(inst, LiftedVariant::kCapReal));
  validate_etas_capreal(inst, e);
  const double beta = params.beta;
  const Index n = inst.n();
  const Matrix In = Matrix::Identity(n, n);

  LiftedState s = start.value_or(zero_state(inst));
  LiftedState prev = s;

  CapRealResult out;
  double gnorm_delta = 0.0;
  for (int k = 0; k < params.max_iter; ++k) {
    const double ak = schedule_alpha(params.schedule, k, gnorm_delta);

    // Step 1: inertial extrapolation of all five variables
    const Vector xb = s.x + ak * (s.x - prev.x);
    const Matrix Xb = s.X + ak * (s.X - prev.X);
    const Matrix Yb = s.Y + ak * (s.Y - prev.Y);
    const Vector zb = s.z + ak * (s.z - prev.z);
    const Matrix Zb = s.Z + ak * (s.Z - prev.Z);

    const Vector AXb = lift_forward(inst, Xb);
    const Vector AYb = lift_forward(inst, Yb);
    const Vector mid = 0.5 * AXb + 0.5 * AYb;

    // Step 2: x
    const Vector x_new = soft_threshold(
        Vector(xb - e.eta1 * (inst.B.transpose() * (mid + inst.B * xb - inst.c - zb / beta))),
        params.lambda * e.eta1 / beta);

    // Step 3: multipliers
    const Vector z_new = zb - beta * (mid + inst.B * x_new - inst.c);
    const Matrix Z_new = Zb - beta * (Xb - Yb);

    // Steps 4-5: X (PSD-projected) and Y (soft-thresholded), both against
    // x^{k+1} and the fresh multipliers
    const Vector Rz = mid + inst.B * x_new - inst.c - z_new / beta;
    const Matrix AsRz = lift_adjoint(inst, Rz).mat();
    const Matrix D = Xb - Yb - Z_new / beta;
    const Matrix X_new =
        psd_project(SymmetricMatrix(Xb - (e.eta2 / beta) * In - 0.5 * e.eta2 * AsRz - e.eta2 * D))
            .mat();
    const double y_thresh = params.tau * (params.literal_y_threshold ? e.eta2 : e.eta3) / beta;
    const Matrix Y_new =
        symmetrize(soft_threshold(Matrix(Yb - 0.5 * e.eta3 * AsRz + e.eta3 * D), y_thresh));

    // Stopping residual, Eq.-(2.9) style with l = 3 and prox-linear weights
    const Vector dx = x_new - xb;
    double res = (beta / e.eta1) * dx.squaredNorm() - beta * (inst.B * dx).squaredNorm();
    res += 2.0 * beta / e.eta2 * (X_new - Xb).squaredNorm();
    res += 2.0 * beta / e.eta3 * (Y_new - Yb).squaredNorm();
    res += 3.0 / beta * ((z_new - zb).squaredNorm() + (Z_new - Zb).squaredNorm());

    StateDelta d{x_new - s.x, Vector(), z_new - s.z, X_new - s.X, Y_new - s.Y, Z_new - s.Z};
    gnorm_delta = std::sqrt(capreal_g_quad(inst, e, beta, d));

    prev = std::move(s);
    s.x = x_new;
    s.X = X_new;
    s.Y = Y_new;
    s.z = z_new;
    s.Z = Z_new;
    s.y = prev.y;

    const double bic = biconvex_ratio(s.Y, s.x);
    const double feas = (0.5 * lift_forward(inst, s.X) + 0.5 * lift_forward(inst, s.Y) +
                         inst.B * s.x - inst.c)
                            .norm() +
                        (s.X - s.Y).norm();
    out.trace.records.push_back(make_record(k + 1, res, bic, feas, ground_truth, s.x));
    out.iterations = k + 1;

    check_finite_state(s.x.squaredNorm() + s.X.squaredNorm() + s.Y.squaredNorm() +
                           s.z.squaredNorm() + s.Z.squaredNorm(),
                       k, "capreal_run");
    if (observer) observer(k, s);
    if (res <= params.epsilon && bic <= params.epsilon_tilde) {
      out.converged = true;
      break;
    }
  }
  out.x_hat = s.x;
  out.X_hat = s.X;
  out.Y_hat = s.Y;
  return out;
}

Vector pcapreal_y_update(PNorm p, const Vector& ybar, const Vector& r,
                         const CapRealParams& params, double eta1) {
  const double beta = params.beta;
  switch (p) {
    case PNorm::kOne:
      return soft_threshold(Vector(ybar + eta1 * r), params.rho * eta1 / beta);
    case PNorm::kTwo:
      return (beta / (beta + 2.0 * params.rho * eta1)) * (ybar + eta1 * r);
    case PNorm::kInf:
      return linf_prox(Vector(ybar + eta1 * r), params.rho * eta1 / beta);
  }
  throw InvalidArgument("pcapreal_y_update: unsupported p");
}

CapRealResult pcapreal_run(const LiftedInstance& inst, PNorm p, const CapRealParams& params,
                           const std::optional<Vector>& ground_truth,
                           const std::optional<LiftedState>& start) {
  params.validate();
  const CapRealEtas e = params.etas.value_or(default_etas(inst, LiftedVariant::kPCapReal));
  validate_etas_pcapreal(inst, e);
  const double beta = params.beta;
  const Index n = inst.n();
  const Matrix In = Matrix::Identity(n, n);

  LiftedState s = start.value_or(zero_state(inst));
  LiftedState prev = s;

  CapRealResult out;
  double gnorm_delta = 0.0;
  for (int k = 0; k < params.max_iter; ++k) {
    const double ak = schedule_alpha(params.schedule, k, gnorm_delta);

    const Vector yb = s.y + ak * (s.y - prev.y);
    const Vector xb = s.x + ak * (s.x - prev.x);
    const Matrix Xb = s.X + ak * (s.X - prev.X);
    const Matrix Yb = s.Y + ak * (s.Y - prev.Y);
    const Vector zb = s.z + ak * (s.z - prev.z);
    const Matrix Zb = s.Z + ak * (s.Z - prev.Z);

    const Vector mid = 0.5 * lift_forward(inst, Xb) + 0.5 * lift_forward(inst, Yb);

    // Step 2: slack block
    const Vector r = mid + inst.B * xb - yb - inst.c - zb / beta;
    const Vector y_new = pcapreal_y_update(p, yb, r, params, e.eta1);

    // Step 3: multipliers (the x block updates later, so z uses x_bar)
    const Vector z_new = zb - beta * (mid + inst.B * xb - y_new - inst.c);
    const Matrix Z_new = Zb - beta * (Xb - Yb);

    // Steps 4-6: X, Y, x against y^{k+1} and the fresh multipliers
    const Vector Rz = mid + inst.B * xb - y_new - inst.c - z_new / beta;
    const Matrix AsRz = lift_adjoint(inst, Rz).mat();
    const Matrix D = Xb - Yb - Z_new / beta;
    const Matrix X_new =
        psd_project(SymmetricMatrix(Xb - (e.eta2 / beta) * In - 0.5 * e.eta2 * AsRz - e.eta2 * D))
            .mat();
    const double y_thresh = params.tau * (params.literal_y_threshold ? e.eta2 : e.eta3) / beta;
    const Matrix Y_new =
        symmetrize(soft_threshold(Matrix(Yb - 0.5 * e.eta3 * AsRz + e.eta3 * D), y_thresh));
    const Vector x_new = soft_threshold(Vector(xb - e.eta4 * (inst.B.transpose() * Rz)),
                                        params.lambda * e.eta4 / beta);

    // Eq.-(2.9) with l = 4: the slack is block 1 with H_1 = beta (1/eta1 - 1) I
    const Vector dy = y_new - yb;
    double res = beta * (1.0 / e.eta1 - 1.0) * dy.squaredNorm();
    res += 2.0 * beta / e.eta2 * (X_new - Xb).squaredNorm();
    res += 2.0 * beta / e.eta3 * (Y_new - Yb).squaredNorm();
    res += 2.0 * beta / e.eta4 * (x_new - xb).squaredNorm();
    res += 4.0 / beta * ((z_new - zb).squaredNorm() + (Z_new - Zb).squaredNorm());

    StateDelta d{x_new - s.x, y_new - s.y, z_new - s.z, X_new - s.X, Y_new - s.Y, Z_new - s.Z};
    gnorm_delta = std::sqrt(pcapreal_g_quad(inst, e, beta, d));

    prev = std::move(s);
    s.x = x_new;
    s.X = X_new;
    s.Y = Y_new;
    s.z = z_new;
    s.Z = Z_new;
    s.y = y_new;

    const double bic = biconvex_ratio(s.Y, s.x);
    const double feas = (0.5 * lift_forward(inst, s.X) + 0.5 * lift_forward(inst, s.Y) +
                         inst.B * s.x - s.y - inst.c)
                            .norm() +
                        (s.X - s.Y).norm();
    out.trace.records.push_back(make_record(k + 1, res, bic, feas, ground_truth, s.x));
    out.iterations = k + 1;

    check_finite_state(s.x.squaredNorm() + s.X.squaredNorm() + s.Y.squaredNorm() +
                           s.z.squaredNorm() + s.Z.squaredNorm() + s.y.squaredNorm(),
                       k, "pcapreal_run");
    if (res <= params.epsilon && bic <= params.epsilon_tilde) {
      out.converged = true;
      break;
    }
  }
  out.x_hat = s.x;
  out.X_hat = s.X;
  out.Y_hat = s.Y;
  out.y_hat = s.y;
  return out;
}

namespace {

CapRealResult jacobi_run(const LiftedInstance& inst, const CapRealParams& params,
                         const std::optional<Vector>& ground_truth) {
  // l-block Jacobi regularization bound: eta_j <= 1/(l ||A_j||^2), l = 3.
  const double eta1 = 0.95 / (3.0 * inst.norm_BtB);
  const double eta2 = 0.95 * 4.0 / (3.0 * inst.norm_AA4);
  const double eta3 = eta2;
  const double beta = params.beta;
  const double gamma = params.jacobi_gamma;
  const Index n = inst.n();
  const Matrix In = Matrix::Identity(n, n);

  LiftedState s = zero_state(inst);
  CapRealResult out;
  for (int k = 0; k < params.max_iter; ++k) {
    const Vector mid = 0.5 * lift_forward(inst, s.X) + 0.5 * lift_forward(inst, s.Y);
    const Vector x_new = soft_threshold(
        Vector(s.x - eta1 * (inst.B.transpose() * (mid + inst.B * s.x - inst.c - s.z / beta))),
        params.lambda * eta1 / beta);

    const Vector R1 = mid + inst.B * x_new - inst.c - s.z / beta;
    const Matrix AsR1 = lift_adjoint(inst, R1).mat();
    const Matrix D = s.X - s.Y - s.Z / beta;
    const Matrix X_new =
        psd_project(SymmetricMatrix(s.X - (eta2 / beta) * In - 0.5 * eta2 * AsR1 - eta2 * D)).mat();
    const double y_thresh = params.tau * (params.literal_y_threshold ? eta2 : eta3) / beta;
    const Matrix Y_new =
        symmetrize(soft_threshold(Matrix(s.Y - 0.5 * eta3 * AsR1 + eta3 * D), y_thresh));

    const Vector z_new =
        s.z - gamma * beta *
                  (0.5 * lift_forward(inst, X_new) + 0.5 * lift_forward(inst, Y_new) +
                   inst.B * x_new - inst.c);
    const Matrix Z_new = s.Z - gamma * beta * (X_new - s.Y);  // Y lags one sweep here

    double res = 2.0 * beta / eta1 * (x_new - s.x).squaredNorm();
    res += 2.0 * beta / eta2 * (X_new - s.X).squaredNorm();
    res += 2.0 * beta / eta3 * (Y_new - s.Y).squaredNorm();
    res += (3.0 - gamma) / (beta * gamma * gamma) *
           ((z_new - s.z).squaredNorm() + (Z_new - s.Z).squaredNorm());

    s.x = x_new;
    s.X = X_new;
    s.Y = Y_new;
    s.z = z_new;
    s.Z = Z_new;

    const double bic = biconvex_ratio(s.Y, s.x);
    const double feas = (0.5 * lift_forward(inst, s.X) + 0.5 * lift_forward(inst, s.Y) +
                         inst.B * s.x - inst.c)
                            .norm() +
                        (s.X - s.Y).norm();
    out.trace.records.push_back(make_record(k + 1, res, bic, feas, ground_truth, s.x));
    out.iterations = k + 1;

    check_finite_state(s.x.squaredNorm() + s.X.squaredNorm() + s.Y.squaredNorm() +
                           s.z.squaredNorm() + s.Z.squaredNorm(),
                       k, "jacobi_run");
    if (res <= params.epsilon && bic <= params.epsilon_tilde) {
      out.converged = true;
      break;
    }
  }
  out.x_hat = s.x;
  out.X_hat = s.X;
  out.Y_hat = s.Y;
  return out;
}

CapRealResult twisted_run(const LiftedInstance& inst, const CapRealParams& params,
                          const std::optional<Vector>& ground_truth) {
  const double eta1 = 0.95 / (2.0 * inst.norm_BtB);
  const double eta3 = 0.95 * 2.0 / inst.norm_AA4;
  const double eta2 = eta3;  // only enters the literal Y threshold
  const double beta = params.beta;
  const double relax = params.twisted_relax;
  const Index n = inst.n(), m = inst.m();
  const Matrix In = Matrix::Identity(n, n);

  // X solve (I + A_op* A_op / 4)^{-1} by the Woodbury identity through the
  // m x m Gram matrix K_ij = (a_i^T a_j)^2, factorized once.
  const Matrix gram = (inst.A * inst.A.transpose()).cwiseAbs2();
  Eigen::LLT<Matrix> llt(Matrix::Identity(m, m) + 0.25 * gram);
  if (llt.info() != Eigen::Success)
    throw NumericFailure("twisted_run: Gram factorization failed");
  const auto solve_lift = [&](const Matrix& R) -> Matrix {
    const Vector v = llt.solve(lift_forward(inst, R));
    return R - 0.25 * lift_adjoint(inst, v).mat();
  };

  LiftedState s = zero_state(inst);
  CapRealResult out;
  for (int k = 0; k < params.max_iter; ++k) {
    const Vector AY = lift_forward(inst, s.Y);
    const Matrix RHS = (s.Y + s.Z / beta) - In / beta -
                       0.5 * lift_adjoint(inst, Vector(0.5 * AY + inst.B * s.x - inst.c -
                                                       s.z / beta))
                                 .mat();
    const Matrix Xt = psd_project(SymmetricMatrix(solve_lift(RHS))).mat();

    const Vector AXt = lift_forward(inst, Xt);
    const Vector zt = s.z - beta * (0.5 * AXt + 0.5 * AY + inst.B * s.x - inst.c);
    const Matrix Zt = s.Z - beta * (Xt - s.Y);

    const Vector R2 = 0.5 * AXt + 0.5 * AY + inst.B * s.x - inst.c - zt / beta;
    const Vector xt = soft_threshold(Vector(s.x - eta1 * (inst.B.transpose() * R2)),
                                     params.lambda * eta1 / beta);
    const double y_thresh = params.tau * (params.literal_y_threshold ? eta2 : eta3) / beta;
    const Matrix Yt = symmetrize(soft_threshold(
        Matrix(s.Y - 0.5 * eta3 * lift_adjoint(inst, R2).mat() + eta3 * (Xt - s.Y - Zt / beta)),
        y_thresh));

    const double res =
        std::max({(s.x - xt).norm() / (1.0 + s.x.norm()), (s.Y - Yt).norm() / (1.0 + s.Y.norm()),
                  (s.z - zt).norm() / (1.0 + s.z.norm()), (s.Z - Zt).norm() / (1.0 + s.Z.norm())});

    s.X = Xt;
    s.Y = (1.0 - relax) * s.Y + relax * Yt;
    s.x = (1.0 - relax) * s.x + relax * xt;
    s.z = (1.0 - relax) * s.z + relax * zt;
    s.Z = (1.0 - relax) * s.Z + relax * Zt;

    const double bic = biconvex_ratio(s.Y, s.x);
    const double feas = (0.5 * lift_forward(inst, s.X) + 0.5 * lift_forward(inst, s.Y) +
                         inst.B * s.x - inst.c)
                            .norm() +
                        (s.X - s.Y).norm();
    out.trace.records.push_back(make_record(k + 1, res, bic, feas, ground_truth, s.x));
    out.iterations = k + 1;

    check_finite_state(s.x.squaredNorm() + s.X.squaredNorm() + s.Y.squaredNorm() +
                           s.z.squaredNorm() + s.Z.squaredNorm(),
                       k, "twisted_run");
    if (res <= params.epsilon && bic <= params.epsilon_tilde) {
      out.converged = true;
      break;
    }
  }
  out.x_hat = s.x;
  out.X_hat = s.X;
  out.Y_hat = s.Y;
  return out;
}

}  // namespace

CapRealResult baseline_run(BaselineVariant variant, const LiftedInstance& inst,
                           const CapRealParams& params,
                           const std::optional<Vector>& ground_truth) {
  params.validate();
  switch (variant) {
    case BaselineVariant::kZero: {
      CapRealParams p = params;
      p.schedule = Schedule::zero();
      return capreal_run(inst, p, ground_truth);
    }
    case BaselineVariant::kJacobi:
      return jacobi_run(inst, params, ground_truth);
    case BaselineVariant::kTwisted:
      return twisted_run(inst, params, ground_truth);
  }
  throw InvalidArgument("baseline_run: unknown variant");
}

CompensateResult compensate(const Vector& x_hat, const SymmetricMatrix& X_hat,
                            const Matrix& Y_hat, Index s) {
  require(s >= 1, "compensate: sparsity must be at least 1");
  require(X_hat.n() == x_hat.size() && Y_hat.rows() == x_hat.size() &&
              Y_hat.cols() == x_hat.size(),
          "compensate: dimension mismatch");

  if (X_hat.mat().isZero(0.0) && Y_hat.isZero(0.0)) return {x_hat, true};

  // (b1) best rank-one approximation of X_hat, sign aligned with x_hat
  const EigPair top = top_eigpair(X_hat);
  Vector x_tilde = std::sqrt(std::max(top.value, 0.0)) * top.vector;
  if (x_tilde.dot(x_hat) < 0.0) x_tilde = -x_tilde;

  // (b2) best s^2-sparse approximation of Y_hat (largest |entries|, ties by
  // smallest flat column-major index), then its dominant eigen direction
  const Index n = x_hat.size();
  const Index keep = std::min<Index>(s * s, n * n);
  std::vector<Index> idx(static_cast<std::size_t>(n * n));
  std::iota(idx.begin(), idx.end(), 0);
  const double* yd = Y_hat.data();
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    return std::abs(yd[a]) > std::abs(yd[b]);
  });
  Matrix Ys = Matrix::Zero(n, n);
  for (Index t = 0; t < keep; ++t) Ys.data()[idx[static_cast<std::size_t>(t)]] = yd[idx[static_cast<std::size_t>(t)]];

  const EigPair ytop = top_abs_eigpair(SymmetricMatrix(Ys));
  Vector y_tilde = std::sqrt(std::abs(ytop.value)) * ytop.vector;
  if (ytop.degenerate) y_tilde.setZero();
  if (y_tilde.dot(x_hat) < 0.0) y_tilde = -y_tilde;

  // (b3)
  return {Vector((x_hat + x_tilde + y_tilde) / 3.0), false};
}

}  // namespace liftadmm
