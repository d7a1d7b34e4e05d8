#include "liftadmm/multiblock.hpp"

#include "liftadmm/kernel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace liftadmm {

namespace {
constexpr double kDivergenceGuard = 1e12;
constexpr double kPsdTol = 1e-10;
}  // namespace

// ---------------------------------------------------------------------------
// BlockObjective
// ---------------------------------------------------------------------------

BlockObjective BlockObjective::zero() { return {}; }

BlockObjective BlockObjective::quadratic(Matrix Q_in, Vector q_in) {
  BlockObjective f;
  f.kind = ObjectiveKind::kQuadratic;
  f.Q = std::move(Q_in);
  f.q = std::move(q_in);
  require(f.Q.rows() == f.Q.cols() && f.Q.rows() == f.q.size(),
          "quadratic objective: Q must be square and match q");
  return f;
}

BlockObjective BlockObjective::l1(double lambda) {
  require(lambda >= 0.0, "l1 objective: coefficient must be nonnegative");
  BlockObjective f;
  f.kind = ObjectiveKind::kL1;
  f.coeff = lambda;
  return f;
}

BlockObjective BlockObjective::trace_psd(Index dim) {
  require(dim >= 1, "trace_psd objective: dimension must be positive");
  BlockObjective f;
  f.kind = ObjectiveKind::kTracePsd;
  f.mat_dim = dim;
  return f;
}

BlockObjective BlockObjective::lp(int p_in, double rho) {
  require(p_in == 1 || p_in == 2, "lp objective: p must be 1 or 2");
  require(rho >= 0.0, "lp objective: coefficient must be nonnegative");
  BlockObjective f;
  f.kind = ObjectiveKind::kLp;
  f.p = p_in;
  f.coeff = rho;
  return f;
}

BlockObjective BlockObjective::linf(double rho) {
  require(rho >= 0.0, "linf objective: coefficient must be nonnegative");
  BlockObjective f;
  f.kind = ObjectiveKind::kLinf;
  f.coeff = rho;
  return f;
}

double BlockObjective::value(const Vector& x) const {
  switch (kind) {
    case ObjectiveKind::kZero:
      return 0.0;
    case ObjectiveKind::kQuadratic:
      return 0.5 * x.dot(Q * x) + q.dot(x);
    case ObjectiveKind::kL1:
      return coeff * x.lpNorm<1>();
    case ObjectiveKind::kTracePsd: {
      // tr restricted to the PSD cone; the indicator is 0 on feasible iterates
      Eigen::Map<const Matrix> X(x.data(), mat_dim, mat_dim);
      return X.trace();
    }
    case ObjectiveKind::kLp:
      return p == 1 ? coeff * x.lpNorm<1>() : coeff * x.squaredNorm();
    case ObjectiveKind::kLinf:
      return coeff * x.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// BlockProblem / SolverConfig
// ---------------------------------------------------------------------------

Index BlockProblem::n() const {
  Index total = 0;
  for (const auto& b : blocks) total += b.A.cols();
  return total;
}

void BlockProblem::validate() const {
  require(!blocks.empty(), "BlockProblem: at least one block required");
  for (const auto& b : blocks) {
    require(b.A.rows() == m(), "BlockProblem: all A_j must share the row count of c");
    require_finite(b.A, "BlockProblem::A");
    if (b.f.kind == ObjectiveKind::kTracePsd)
      require(b.f.mat_dim * b.f.mat_dim == b.A.cols(),
              "BlockProblem: trace_psd block dimension must be mat_dim^2");
  }
  require_finite(c, "BlockProblem::c");
}

void SolverConfig::validate(Index l) const {
  require(beta > 0.0, "SolverConfig: beta must be positive");
  require(epsilon > 0.0, "SolverConfig: epsilon must be positive");
  require(max_iter >= 1, "SolverConfig: max_iter must be positive");
  if (schedule.kind == ScheduleKind::kConstant)
    require(schedule.alpha >= 0.0 && schedule.alpha < 1.0,
            "SolverConfig: constant schedule requires alpha in [0, 1)");
  require(h.size() == 1 || h.size() == static_cast<std::size_t>(l),
          "SolverConfig: provide one H spec or one per block");
}

HSpec SolverConfig::h_for(Index j) const {
  if (h.size() == 1) return h.front();
  return h[static_cast<std::size_t>(j)];
}

// ---------------------------------------------------------------------------
// Point / Iterate
// ---------------------------------------------------------------------------

Point Point::zero(const BlockProblem& p) {
  Point w;
  w.x.reserve(static_cast<std::size_t>(p.l()));
  for (Index j = 0; j < p.l(); ++j) w.x.push_back(Vector::Zero(p.dim(j)));
  w.z = Vector::Zero(p.m());
  return w;
}

Point Point::operator-(const Point& o) const {
  Point r = *this;
  for (std::size_t j = 0; j < x.size(); ++j) r.x[j] -= o.x[j];
  r.z -= o.z;
  return r;
}

Point Point::operator+(const Point& o) const {
  Point r = *this;
  for (std::size_t j = 0; j < x.size(); ++j) r.x[j] += o.x[j];
  r.z += o.z;
  return r;
}

Point Point::scaled(double a) const {
  Point r = *this;
  for (auto& xj : r.x) xj *= a;
  r.z *= a;
  return r;
}

double Point::sq_norm() const {
  double s = z.squaredNorm();
  for (const auto& xj : x) s += xj.squaredNorm();
  return s;
}

bool Point::all_finite() const {
  if (!z.allFinite()) return false;
  for (const auto& xj : x)
    if (!xj.allFinite()) return false;
  return true;
}

Iterate Iterate::start(const BlockProblem& p, const Point& w0) {
  Iterate it;
  it.w = w0;
  it.w_prev = w0;  // w^{-1} = w^0
  it.w_bar = w0;
  it.k = 0;
  for (Index j = 0; j < p.l(); ++j)
    require(it.w.x[static_cast<std::size_t>(j)].size() == p.dim(j),
            "Iterate: block dimension mismatch");
  require(it.w.z.size() == p.m(), "Iterate: multiplier dimension mismatch");
  return it;
}

void Trace::to_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("Trace::to_csv: cannot open " + path);
  out << "k,alpha_k,stop_residual,feasibility,objective,gnorm_step,gnorm_to_oracle\n";
  out.precision(17);
  for (const auto& r : records) {
    out << r.k << ',' << r.alpha << ',' << r.stop_residual << ',' << r.feasibility << ','
        << r.objective << ',' << r.gnorm_step << ',' << r.gnorm_to_oracle << '\n';
  }
}

// ---------------------------------------------------------------------------
// ProximalMetric
// ---------------------------------------------------------------------------

ProximalMetric::ProximalMetric(const BlockProblem& problem, const SolverConfig& config)
    : problem_(&problem), beta_(config.beta) {
  problem.validate();
  config.validate(problem.l());
  for (Index j = 0; j < problem.l(); ++j) {
    HSpec s = config.h_for(j);
    const Matrix& A = problem.A(j);
    Matrix H;
    switch (s.kind) {
      case HKind::kProxLinear:
        require(s.eta > 0.0, "assemble_metric: prox-linear eta must be positive");
        H = (beta_ / s.eta) * Matrix::Identity(A.cols(), A.cols()) -
            beta_ * (A.transpose() * A);
        break;
      case HKind::kStandardProx:
        require(s.eta > 0.0, "assemble_metric: standard-proximal eta must be positive");
        H = (beta_ / s.eta) * Matrix::Identity(A.cols(), A.cols());
        break;
      case HKind::kExplicit:
        require(s.H.rows() == A.cols() && s.H.cols() == A.cols(),
                "assemble_metric: explicit H has wrong dimensions");
        H = symmetrize(s.H);
        break;
    }
    spec_.push_back(std::move(s));
    h_.push_back(std::move(H));
  }
}

double ProximalMetric::quad_g(const Point& w) const {
  const BlockProblem& p = *problem_;
  double q = w.x[0].dot(h_[0] * w.x[0]);
  Vector coupled = Vector::Zero(p.m());
  for (Index j = 1; j < p.l(); ++j) {
    const auto& xj = w.x[static_cast<std::size_t>(j)];
    const Vector Ax = p.A(j) * xj;
    q += xj.dot(h_[static_cast<std::size_t>(j)] * xj) + beta_ * Ax.squaredNorm();
    coupled += Ax;
  }
  q += w.z.squaredNorm() / beta_ - 2.0 * w.z.dot(coupled);
  return q;
}

double ProximalMetric::quad_g2(const Point& w) const {
  const BlockProblem& p = *problem_;
  double q = w.x[0].dot(h_[0] * w.x[0]);
  Vector coupled = Vector::Zero(p.m());
  for (Index j = 1; j < p.l(); ++j) {
    const auto& xj = w.x[static_cast<std::size_t>(j)];
    const Vector Ax = p.A(j) * xj;
    q += xj.dot(h_[static_cast<std::size_t>(j)] * xj) + beta_ * Ax.squaredNorm();
    coupled += Ax;
  }
  q -= beta_ * coupled.squaredNorm();
  return q;
}

double ProximalMetric::norm_g(const Point& w) const {
  double q = quad_g(w);
  if (q < 0.0) {
    if (q < -1e-10 * std::max(1.0, w.sq_norm()))
      throw NumericFailure("norm_g: negative quadratic form; G is not PSD");
    q = 0.0;
  }
  return std::sqrt(q);
}

Matrix ProximalMetric::dense_g() const {
  const BlockProblem& p = *problem_;
  const Index n = p.n(), m = p.m();
  require(n + m <= 500, "dense_g: n + m exceeds the 500 dense-materialization cap");
  Matrix G = Matrix::Zero(n + m, n + m);
  Index off = 0;
  for (Index j = 0; j < p.l(); ++j) {
    const Index nj = p.dim(j);
    const Matrix& A = p.A(j);
    if (j == 0) {
      G.block(off, off, nj, nj) = h_[0];
    } else {
      G.block(off, off, nj, nj) = beta_ * (A.transpose() * A) + h_[static_cast<std::size_t>(j)];
      G.block(off, n, nj, m) = -A.transpose();
      G.block(n, off, m, nj) = -A;
    }
    off += nj;
  }
  G.block(n, n, m, m) = Matrix::Identity(m, m) / beta_;
  return G;
}

Matrix ProximalMetric::dense_g2() const {
  const BlockProblem& p = *problem_;
  const Index n = p.n(), m = p.m();
  require(n + m <= 500, "dense_g2: n + m exceeds the 500 dense-materialization cap");
  Matrix G2 = Matrix::Zero(n + m, n + m);
  std::vector<Index> offset(static_cast<std::size_t>(p.l()));
  Index off = 0;
  for (Index j = 0; j < p.l(); ++j) {
    offset[static_cast<std::size_t>(j)] = off;
    G2.block(off, off, p.dim(j), p.dim(j)) = h_[static_cast<std::size_t>(j)];
    off += p.dim(j);
  }
  for (Index i = 1; i < p.l(); ++i)
    for (Index j = 1; j < p.l(); ++j) {
      if (i == j) continue;
      G2.block(offset[static_cast<std::size_t>(i)], offset[static_cast<std::size_t>(j)],
               p.dim(i), p.dim(j)) = -beta_ * (p.A(i).transpose() * p.A(j));
    }
  return G2;
}

double ProximalMetric::theta(const Point& w) const {
  double s = 0.0;
  for (Index j = 0; j < problem_->l(); ++j)
    s += problem_->blocks[static_cast<std::size_t>(j)].f.value(w.x[static_cast<std::size_t>(j)]);
  return s;
}

ProximalMetric assemble_metric(const BlockProblem& problem, const SolverConfig& config) {
  return ProximalMetric(problem, config);
}

AssumptionReport verify_assumptions(const ProximalMetric& metric) {
  const BlockProblem& p = metric.problem();
  AssumptionReport rep;

  auto min_eig_dense = [](const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw NumericFailure("verify_assumptions: eigensolver did not converge");
    return es.eigenvalues().minCoeff();
  };

  if (p.n() + p.m() <= 500) {
    rep.g_min_eig = min_eig_dense(symmetrize(metric.dense_g()));
    rep.g2_min_eig = min_eig_dense(symmetrize(metric.dense_g2()));
  } else {
    // Operator-level estimate: power iteration for an upper bound, then a
    // shifted power iteration for the smallest eigenvalue.
    auto estimate_min = [&](const Matrix& M) {
      const double up = spectral_norm(M);
      return up - spectral_norm(up * Matrix::Identity(M.rows(), M.cols()) - M);
    };
    rep.g_min_eig = estimate_min(symmetrize(metric.dense_g()));
    rep.g2_min_eig = estimate_min(symmetrize(metric.dense_g2()));
  }
  rep.g_psd = rep.g_min_eig >= -kPsdTol * std::max(1.0, std::abs(rep.g_min_eig));
  rep.g2_psd = rep.g2_min_eig >= -kPsdTol;

  // Strong condition: H_1 > 0 and H_j > beta (l-2) A_j^T A_j for j >= 2.
  rep.strong_margin = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < p.l(); ++j) {
    Matrix gap = metric.H(j);
    if (j >= 1)
      gap -= metric.beta() * static_cast<double>(p.l() - 2) * (p.A(j).transpose() * p.A(j));
    rep.strong_margin = std::min(rep.strong_margin, min_eig_dense(symmetrize(gap)));
  }
  rep.strong_condition = rep.strong_margin > 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Step size and iteration
// ---------------------------------------------------------------------------

double step_size(const Schedule& schedule, int k, const Trace& history) {
  require(k >= 0, "step_size: k must be nonnegative");
  switch (schedule.kind) {
    case ScheduleKind::kConstant:
      return schedule.alpha;
    case ScheduleKind::kZero:
      return 0.0;
    case ScheduleKind::kAdaptive: {
      if (k == 0 || history.records.empty()) return 1.0 / 3.0;
      const double g = history.records.back().gnorm_delta;
      if (g == 0.0) return 1.0 / 3.0;
      const double t = static_cast<double>(k) * g;
      return std::min(1.0 / 3.0, 1.0 / (t * t));
    }
    case ScheduleKind::kPiecewiseUp:
      return 1.0 / 3.0 - std::pow(3.0, -std::floor(static_cast<double>(k) / 5.0));
    case ScheduleKind::kPiecewiseDown:
      return std::pow(3.0, -std::floor(static_cast<double>(k) / 5.0));
  }
  return 0.0;
}

Point inertial_extrapolate(const Iterate& it, double alpha_k) {
  Point bar = it.w;
  for (std::size_t j = 0; j < bar.x.size(); ++j)
    bar.x[j] += alpha_k * (it.w.x[j] - it.w_prev.x[j]);
  bar.z += alpha_k * (it.w.z - it.w_prev.z);
  return bar;
}

namespace {

/// Closed-form block subproblem
///   min f_j(x) - <z', A_j x> + beta/2 ||A_j x + r||^2 + 1/2 ||x - xbar||_H.
Vector solve_block(const BlockProblem& problem, const ProximalMetric& metric, Index j,
                   const Vector& xbar, const Vector& r, const Vector& zprime) {
  const Block& blk = problem.blocks[static_cast<std::size_t>(j)];
  const Matrix& A = blk.A;
  const double beta = metric.beta();
  const HSpec& spec = metric.h_spec(j);

  if (blk.f.kind == ObjectiveKind::kZero || blk.f.kind == ObjectiveKind::kQuadratic) {
    // Linear solve works under any H spec.
    const Matrix& H = metric.H(j);
    Matrix M = beta * (A.transpose() * A) + H;
    Vector rhs = A.transpose() * zprime - beta * (A.transpose() * r) + H * xbar;
    if (blk.f.kind == ObjectiveKind::kQuadratic) {
      M += blk.f.Q;
      rhs -= blk.f.q;
    }
    Eigen::LDLT<Matrix> ldlt(symmetrize(M));
    if (ldlt.info() != Eigen::Success)
      throw NumericFailure("block " + std::to_string(j) + ": subproblem solve failed");
    return ldlt.solve(rhs);
  }

  // Remaining families need the prox-linear cancellation.
  if (spec.kind != HKind::kProxLinear)
    throw InvalidArgument("block " + std::to_string(j) +
                          ": objective family has no closed form under this H spec "
                          "(prox-linear required)");
  const double eta = spec.eta;
  const Vector v = xbar - eta * (A.transpose() * (A * xbar + r - zprime / beta));
  const double step = eta / beta;

  switch (blk.f.kind) {
    case ObjectiveKind::kL1:
      return soft_threshold(Vector(v), blk.f.coeff * step);
    case ObjectiveKind::kTracePsd: {
      const Index d = blk.f.mat_dim;
      Eigen::Map<const Matrix> V(v.data(), d, d);
      const Matrix shifted = Matrix(V) - step * Matrix::Identity(d, d);
      const Matrix P = psd_project(SymmetricMatrix(shifted)).mat();
      return Eigen::Map<const Vector>(P.data(), d * d);
    }
    case ObjectiveKind::kLp:
      if (blk.f.p == 1) return soft_threshold(Vector(v), blk.f.coeff * step);
      return (beta / (beta + 2.0 * blk.f.coeff * eta)) * v;
    case ObjectiveKind::kLinf:
      return linf_prox(v, blk.f.coeff * step);
    default:
      throw InvalidArgument("block " + std::to_string(j) + ": unsupported objective");
  }
}

}  // namespace

Iterate iadmm_iterate(const Iterate& it, const BlockProblem& problem,
                      const SolverConfig& config, const ProximalMetric& metric) {
  (void)config;
  const Index l = problem.l();
  const double beta = metric.beta();
  const Point& bar = it.w_bar;

  Iterate next;
  next.w_prev = it.w;
  next.w_bar = bar;
  next.k = it.k + 1;
  next.w.x.resize(static_cast<std::size_t>(l));

  // x_1 against (x_bar_2, ..., x_bar_l; z_bar)
  Vector r1 = -problem.c;
  for (Index j = 1; j < l; ++j) r1 += problem.A(j) * bar.x[static_cast<std::size_t>(j)];
  next.w.x[0] = solve_block(problem, metric, 0, bar.x[0], r1, bar.z);

  // z^{k+1} = z_bar - beta (A_1 x_1^{k+1} + sum_{j>=2} A_j x_bar_j - c)
  next.w.z = bar.z - beta * (problem.A(0) * next.w.x[0] + r1);

  // x_2 ... x_l, each against (x_1^{k+1}, x_bar of the others; z^{k+1});
  // these write disjoint blocks and read only shared immutable state.
  const Vector head = problem.A(0) * next.w.x[0] - problem.c;
  Vector tail_all = Vector::Zero(problem.m());
  for (Index j = 1; j < l; ++j) tail_all += problem.A(j) * bar.x[static_cast<std::size_t>(j)];
  for (Index i = 1; i < l; ++i) {
    const Vector ri = head + tail_all - problem.A(i) * bar.x[static_cast<std::size_t>(i)];
    next.w.x[static_cast<std::size_t>(i)] =
        solve_block(problem, metric, i, bar.x[static_cast<std::size_t>(i)], ri, next.w.z);
  }
  return next;
}

double stopping_residual(const Iterate& it, const BlockProblem& problem,
                         const ProximalMetric& metric) {
  const Index l = problem.l();
  const double beta = metric.beta();
  const Vector dx1 = it.w.x[0] - it.w_bar.x[0];
  double res = dx1.dot(metric.H(0) * dx1);
  for (Index j = 1; j < l; ++j) {
    const Vector dj = it.w.x[static_cast<std::size_t>(j)] - it.w_bar.x[static_cast<std::size_t>(j)];
    const Vector Adj = problem.A(j) * dj;
    res += 2.0 * (beta * Adj.squaredNorm() + dj.dot(metric.H(j) * dj));
  }
  res += static_cast<double>(l) / beta * (it.w.z - it.w_bar.z).squaredNorm();
  return res;
}

namespace {

RunResult run_impl(const BlockProblem& problem, const SolverConfig& config,
                   const std::optional<Point>& oracle, const std::optional<Point>& start,
                   bool inertial) {
  problem.validate();
  config.validate(problem.l());
  const ProximalMetric metric = assemble_metric(problem, config);

  RunResult out;
  out.assumptions = verify_assumptions(metric);
  if (!out.assumptions.strong_condition) {
    out.certified_warning = true;
    std::cerr << "[multiblock] warning: strong regularization condition fails "
                 "(margin "
              << out.assumptions.strong_margin << "); convergence not certified\n";
  }

  Iterate it = Iterate::start(problem, start.value_or(Point::zero(problem)));
  for (int k = 0; k < config.max_iter; ++k) {
    it.k = k;
    const double alpha_k = inertial ? step_size(config.schedule, k, out.trace) : 0.0;
    it.w_bar = inertial ? inertial_extrapolate(it, alpha_k) : it.w;

    Iterate next = iadmm_iterate(it, problem, config, metric);
    if (!next.w.all_finite())
      throw NumericFailure("run: non-finite iterate at k=" + std::to_string(k));
    if (next.w.sq_norm() > kDivergenceGuard * kDivergenceGuard)
      throw NumericFailure("run: iterate norm exceeded divergence guard 1e12 at k=" +
                           std::to_string(k));

    TraceRecord rec;
    rec.k = k + 1;
    rec.alpha = alpha_k;
    rec.stop_residual = stopping_residual(next, problem, metric);
    Vector feas = -problem.c;
    for (Index j = 0; j < problem.l(); ++j)
      feas += problem.A(j) * next.w.x[static_cast<std::size_t>(j)];
    rec.feasibility = feas.norm();
    rec.objective = metric.theta(next.w);
    rec.gnorm_step = metric.norm_g(next.w - it.w_bar);
    rec.gnorm_delta = metric.norm_g(next.w - it.w);
    rec.gnorm_to_oracle =
        oracle ? metric.norm_g(next.w - *oracle) : std::numeric_limits<double>::quiet_NaN();
    out.trace.records.push_back(rec);

    it = std::move(next);
    if (rec.stop_residual <= config.epsilon) {
      out.reason = Termination::kConverged;
      break;
    }
  }
  out.solution = it.w;
  return out;
}

}  // namespace

RunResult run(const BlockProblem& problem, const SolverConfig& config,
              const std::optional<Point>& oracle, const std::optional<Point>& start) {
  return run_impl(problem, config, oracle, start, /*inertial=*/true);
}

RunResult run_plain(const BlockProblem& problem, const SolverConfig& config,
                    const std::optional<Point>& oracle, const std::optional<Point>& start) {
  return run_impl(problem, config, oracle, start, /*inertial=*/false);
}

// ---------------------------------------------------------------------------
// Oracle and diagnostics
// ---------------------------------------------------------------------------

Point quadratic_kkt_oracle(const BlockProblem& problem) {
  problem.validate();
  const Index l = problem.l(), n = problem.n(), m = problem.m();
  for (Index j = 0; j < l; ++j)
    if (problem.blocks[static_cast<std::size_t>(j)].f.kind != ObjectiveKind::kQuadratic &&
        problem.blocks[static_cast<std::size_t>(j)].f.kind != ObjectiveKind::kZero)
      throw OracleUnavailable("quadratic_kkt_oracle: block " + std::to_string(j) +
                              " is not quadratic");

  Matrix K = Matrix::Zero(n + m, n + m);
  Vector rhs = Vector::Zero(n + m);
  Index off = 0;
  for (Index j = 0; j < l; ++j) {
    const Index nj = problem.dim(j);
    const auto& f = problem.blocks[static_cast<std::size_t>(j)].f;
    if (f.kind == ObjectiveKind::kQuadratic) {
      K.block(off, off, nj, nj) = f.Q;
      rhs.segment(off, nj) = -f.q;
    }
    K.block(off, n, nj, m) = -problem.A(j).transpose();
    K.block(n, off, m, nj) = problem.A(j);
    off += nj;
  }
  rhs.tail(m) = problem.c;

  Eigen::FullPivLU<Matrix> lu(K);
  if (!lu.isInvertible())
    throw OracleUnavailable("quadratic_kkt_oracle: singular KKT matrix");
  const Vector sol = lu.solve(rhs);
  const double resid = (K * sol - rhs).norm();
  if (resid > 1e-10 * std::max(1.0, rhs.norm()))
    throw OracleUnavailable("quadratic_kkt_oracle: residual " + std::to_string(resid) +
                            " exceeds tolerance");

  Point w;
  off = 0;
  for (Index j = 0; j < l; ++j) {
    w.x.push_back(sol.segment(off, problem.dim(j)));
    off += problem.dim(j);
  }
  w.z = sol.tail(m);
  return w;
}

double block_optimality_residual(const BlockProblem& problem, const ProximalMetric& metric,
                                 Index j, const Vector& xnew, const Vector& xbar,
                                 const Vector& zvec, const Vector& rj) {
  const Block& blk = problem.blocks[static_cast<std::size_t>(j)];
  const Matrix& A = blk.A;
  const double beta = metric.beta();
  // Smooth part of the subgradient at xnew.
  Vector g = -A.transpose() * zvec + beta * A.transpose() * (A * xnew + rj) +
             metric.H(j) * (xnew - xbar);

  auto dist_l1 = [&](double lambda) {
    // distance of -g to lambda * subdifferential of ||.||_1 at xnew
    double worst = 0.0;
    for (Index i = 0; i < xnew.size(); ++i) {
      if (xnew[i] != 0.0)
        worst = std::max(worst, std::abs(g[i] + lambda * (xnew[i] > 0 ? 1.0 : -1.0)));
      else
        worst = std::max(worst, std::max(0.0, std::abs(g[i]) - lambda));
    }
    return worst;
  };

  switch (blk.f.kind) {
    case ObjectiveKind::kZero:
      return g.lpNorm<Eigen::Infinity>();
    case ObjectiveKind::kQuadratic:
      return (g + blk.f.Q * xnew + blk.f.q).lpNorm<Eigen::Infinity>();
    case ObjectiveKind::kL1:
      return dist_l1(blk.f.coeff);
    case ObjectiveKind::kLp:
      if (blk.f.p == 1) return dist_l1(blk.f.coeff);
      return (g + 2.0 * blk.f.coeff * xnew).lpNorm<Eigen::Infinity>();
    case ObjectiveKind::kTracePsd: {
      // Projection optimality: xnew = P_psd(M) for M = mat(v) - step I; verify
      // with the variational inequality <X - xnew, xnew - M> >= 0 via residual
      // of the re-projection.
      const Index d = blk.f.mat_dim;
      const HSpec& spec = metric.h_spec(j);
      const Vector v = xbar - spec.eta * (A.transpose() * (A * xbar + rj - zvec / beta));
      Eigen::Map<const Matrix> V(v.data(), d, d);
      const Matrix M = Matrix(V) - (spec.eta / beta) * Matrix::Identity(d, d);
      const Matrix P = psd_project(SymmetricMatrix(M)).mat();
      Eigen::Map<const Matrix> Xn(xnew.data(), d, d);
      return (P - Xn).norm();
    }
    case ObjectiveKind::kLinf: {
      // Moreau: xnew + P_{coeff*step*B1}(v) == v must hold exactly.
      const HSpec& spec = metric.h_spec(j);
      const Vector v = xbar - spec.eta * (A.transpose() * (A * xbar + rj - zvec / beta));
      return (xnew + l1_ball_project(v, blk.f.coeff * spec.eta / beta) - v)
          .lpNorm<Eigen::Infinity>();
    }
  }
  return 0.0;
}

}  // namespace liftadmm
