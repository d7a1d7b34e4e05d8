#pragma once

// Generic inertial proximal ADMM for linearly constrained separable
// multi-block convex programs
//
//   min sum_j f_j(x_j)   s.t.  sum_j A_j x_j = c,
//
// with per-block proximal regularization matrices H_j, inertial
// extrapolation w_bar = w + alpha_k (w - w_prev), and the block-structured
// proximal metric G used for step-size control and diagnostics.

#include "liftadmm/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace liftadmm {

// ---------------------------------------------------------------------------
// Problem model
// ---------------------------------------------------------------------------

enum class ObjectiveKind { kZero, kQuadratic, kL1, kTracePsd, kLp, kLinf };

/// Closed convex objective of one block. Every family shipped here has a
/// closed-form minimizer under prox-linear regularization.
struct BlockObjective {
  ObjectiveKind kind = ObjectiveKind::kZero;
  Matrix Q;            // quadratic: 1/2 x^T Q x + q^T x, Q PSD
  Vector q;
  double coeff = 0.0;  // lambda for l1, rho for lp / linf
  int p = 2;           // for kLp: 1 or 2
  Index mat_dim = 0;   // for kTracePsd: block is vec of a mat_dim x mat_dim matrix

  static BlockObjective zero();
  static BlockObjective quadratic(Matrix Q_in, Vector q_in);
  static BlockObjective l1(double lambda);
  static BlockObjective trace_psd(Index dim);
  static BlockObjective lp(int p_in, double rho);
  static BlockObjective linf(double rho);

  double value(const Vector& x) const;
};

struct Block {
  Matrix A;  // m x n_j
  BlockObjective f;
};

struct BlockProblem {
  std::vector<Block> blocks;
  Vector c;

  Index l() const { return static_cast<Index>(blocks.size()); }
  Index m() const { return c.size(); }
  Index n() const;
  Index dim(Index j) const { return blocks[static_cast<std::size_t>(j)].A.cols(); }
  const Matrix& A(Index j) const { return blocks[static_cast<std::size_t>(j)].A; }

  void validate() const;  // shared row count, >= 1 block, finite data
};

// ---------------------------------------------------------------------------
// Solver configuration
// ---------------------------------------------------------------------------

enum class HKind { kProxLinear, kStandardProx, kExplicit };

/// Regularization spec per block: prox-linear beta/eta I - beta A^T A,
/// standard proximal beta/eta I, or an explicit PSD matrix.
struct HSpec {
  HKind kind = HKind::kProxLinear;
  double eta = 0.0;
  Matrix H;  // kExplicit only

  static HSpec prox_linear(double eta_in) { return {HKind::kProxLinear, eta_in, {}}; }
  static HSpec standard(double eta_in) { return {HKind::kStandardProx, eta_in, {}}; }
  static HSpec explicit_matrix(Matrix h) { return {HKind::kExplicit, 0.0, std::move(h)}; }
};

enum class ScheduleKind { kConstant, kZero, kAdaptive, kPiecewiseUp, kPiecewiseDown };

/// Inertial step-size schedule. kPiecewiseUp is 1/3 - 3^{-floor(k/5)}
/// (computed exactly; negative for k < 5), kPiecewiseDown is 3^{-floor(k/5)},
/// kAdaptive is min{1/3, (k ||w^k - w^{k-1}||_G)^{-2}} with alpha_0 = 1/3.
struct Schedule {
  ScheduleKind kind = ScheduleKind::kConstant;
  double alpha = 0.25;

  static Schedule constant(double a) { return {ScheduleKind::kConstant, a}; }
  static Schedule zero() { return {ScheduleKind::kZero, 0.0}; }
  static Schedule adaptive() { return {ScheduleKind::kAdaptive, 1.0 / 3.0}; }
  static Schedule piecewise_up() { return {ScheduleKind::kPiecewiseUp, 0.0}; }
  static Schedule piecewise_down() { return {ScheduleKind::kPiecewiseDown, 0.0}; }
};

struct SolverConfig {
  double beta = 1.0;
  std::vector<HSpec> h;  // one per block, or a single entry applied to all
  Schedule schedule = Schedule::constant(0.25);
  double epsilon = 1e-8;
  int max_iter = 10000;
  std::uint64_t seed = 0;

  void validate(Index l) const;
  HSpec h_for(Index j) const;
};

// ---------------------------------------------------------------------------
// Iterates and diagnostics
// ---------------------------------------------------------------------------

/// Stacked variable w = (x_1, ..., x_l; z).
struct Point {
  std::vector<Vector> x;
  Vector z;

  static Point zero(const BlockProblem& p);
  Point operator-(const Point& o) const;
  Point operator+(const Point& o) const;
  Point scaled(double a) const;
  double sq_norm() const;  // Euclidean on the stack
  bool all_finite() const;
};

/// Current iterate w^k, previous w^{k-1} (for inertia), extrapolated w_bar^k.
/// At k = 0, w_prev = w.
struct Iterate {
  Point w;
  Point w_prev;
  Point w_bar;
  int k = 0;

  static Iterate start(const BlockProblem& p, const Point& w0);
};

struct TraceRecord {
  int k = 0;
  double alpha = 0.0;
  double stop_residual = 0.0;   // Eq.-(2.9)-style value
  double feasibility = 0.0;     // ||sum_j A_j x_j - c||_2
  double objective = 0.0;       // theta(w^k)
  double gnorm_step = 0.0;      // ||w^k - w_bar^{k-1}||_G
  double gnorm_to_oracle = 0.0; // ||w^k - w*||_G when an oracle is supplied, else NaN
  double gnorm_delta = 0.0;     // ||w^k - w^{k-1}||_G (drives the adaptive schedule)
};

struct Trace {
  std::vector<TraceRecord> records;
  void to_csv(const std::string& path) const;
};

// ---------------------------------------------------------------------------
// Proximal metric G / G2
// ---------------------------------------------------------------------------

struct AssumptionReport {
  bool g_psd = false;
  bool g2_psd = false;
  bool strong_condition = false;  // H_1 > 0 and H_j > beta (l-2) A_j^T A_j
  double g_min_eig = 0.0;
  double g2_min_eig = 0.0;
  double strong_margin = 0.0;  // min over blocks of the smallest eigenvalue of the gap
  bool convergence_certified() const { return g_psd && g2_psd && strong_condition; }
};

/// Block-structured G (Eq.-(2.6) pattern) and G2 with exact seminorm
/// evaluation via the block formula; dense forms available for n + m <= 500.
class ProximalMetric {
 public:
  ProximalMetric(const BlockProblem& problem, const SolverConfig& config);

  double beta() const { return beta_; }
  const Matrix& H(Index j) const { return h_[static_cast<std::size_t>(j)]; }
  const HSpec& h_spec(Index j) const { return spec_[static_cast<std::size_t>(j)]; }

  double quad_g(const Point& w) const;
  double quad_g2(const Point& w) const;
  double norm_g(const Point& w) const;

  Matrix dense_g() const;
  Matrix dense_g2() const;

  /// theta(w) = sum_j f_j(x_j).
  double theta(const Point& w) const;

  const BlockProblem& problem() const { return *problem_; }

 private:
  const BlockProblem* problem_;
  double beta_;
  std::vector<HSpec> spec_;
  std::vector<Matrix> h_;
};

ProximalMetric assemble_metric(const BlockProblem& problem, const SolverConfig& config);

/// PSD checks for G, G2 and the strong condition of the main convergence
/// theorem. Always returns a report; the solver runs (with a warning) when
/// only the weak conditions hold.
AssumptionReport verify_assumptions(const ProximalMetric& metric);

// ---------------------------------------------------------------------------
// Iteration
// ---------------------------------------------------------------------------

double step_size(const Schedule& schedule, int k, const Trace& history);

/// w_bar^k = w^k + alpha_k (w^k - w^{k-1}), componentwise.
Point inertial_extrapolate(const Iterate& it, double alpha_k);

/// One Prox-ADMM sweep (Eqs. 2.5b-2.5d) from the extrapolated point in
/// it.w_bar: x_1 against (x_bar_2..x_bar_l; z_bar), then z, then x_2..x_l in
/// parallel against (x_1^{k+1}, x_bar of the others; z^{k+1}).
Iterate iadmm_iterate(const Iterate& it, const BlockProblem& problem,
                      const SolverConfig& config, const ProximalMetric& metric);

/// Eq.-(2.9) value for the step from it.w_bar (extrapolation at k) to it.w
/// (the freshly computed iterate).
double stopping_residual(const Iterate& it, const BlockProblem& problem,
                         const ProximalMetric& metric);

enum class Termination { kConverged, kMaxIterations };

struct RunResult {
  Point solution;
  Trace trace;
  Termination reason = Termination::kMaxIterations;
  AssumptionReport assumptions;
  bool certified_warning = false;  // strong condition failed; ran anyway
};

/// Full driver: verify assumptions, loop Step 1-3 until the Eq.-(2.9)
/// residual falls below epsilon or max_iter is hit. Deterministic for fixed
/// inputs. Throws NumericFailure with diagnostics if an iterate leaves the
/// finite range or exceeds the 1e12 divergence guard.
RunResult run(const BlockProblem& problem, const SolverConfig& config,
              const std::optional<Point>& oracle = std::nullopt,
              const std::optional<Point>& start = std::nullopt);

/// Plain (non-inertial) Prox-ADMM path, Eq. (2.4): identical arithmetic with
/// w_bar = w. Used to pin down the alpha == 0 equivalence.
RunResult run_plain(const BlockProblem& problem, const SolverConfig& config,
                    const std::optional<Point>& oracle = std::nullopt,
                    const std::optional<Point>& start = std::nullopt);

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

class OracleUnavailable : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

/// Exact KKT point for all-quadratic problems by one dense factorization of
/// the stacked system [diag(Q_j), -A^T; A, 0] (x; z) = (-q; c).
Point quadratic_kkt_oracle(const BlockProblem& problem);

/// Residual of the first-order optimality condition of block j's subproblem
/// at xnew, given the extrapolated block value xbar, the multiplier z used in
/// the update, and the off-block constraint residual r_j. Test/diagnostic use.
double block_optimality_residual(const BlockProblem& problem, const ProximalMetric& metric,
                                 Index j, const Vector& xnew, const Vector& xbar,
                                 const Vector& zvec, const Vector& rj);

}  // namespace liftadmm
