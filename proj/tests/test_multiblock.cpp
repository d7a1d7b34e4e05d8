#include "liftadmm/multiblock.hpp"

#include "liftadmm/kernel.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>

using namespace liftadmm;
using test_util::random_matrix;
using test_util::random_vector;

namespace {

/// Random well-conditioned quadratic l-block problem.
BlockProblem quadratic_problem(Philox& rng, Index l, Index nj, Index m) {
  BlockProblem p;
  for (Index j = 0; j < l; ++j) {
    Block blk;
    blk.A = random_matrix(rng, m, nj);
    const Matrix g = random_matrix(rng, nj, nj);
    blk.f = BlockObjective::quadratic(Matrix(g * g.transpose() + 0.5 * Matrix::Identity(nj, nj)),
                                      random_vector(rng, nj));
    p.blocks.push_back(std::move(blk));
  }
  p.c = random_vector(rng, m);
  return p;
}

SolverConfig oracle_config(const BlockProblem& p, double alpha = 0.25) {
  SolverConfig cfg;
  cfg.beta = 1.0;
  cfg.schedule = Schedule::constant(alpha);
  cfg.epsilon = 1e-16;
  cfg.max_iter = 10000;
  for (Index j = 0; j < p.l(); ++j) {
    const double nrm = spectral_norm(p.A(j));
    cfg.h.push_back(HSpec::prox_linear(0.9 / ((p.l() - 1) * nrm * nrm)));
  }
  return cfg;
}

double dist2(const Point& a, const Point& b) { return std::sqrt((a - b).sq_norm()); }

}  // namespace

TEST_CASE("assemble_metric single block has no coupling row") {
  BlockProblem p;
  Block blk;
  blk.A = Matrix::Identity(3, 3);
  blk.f = BlockObjective::zero();
  p.blocks.push_back(blk);
  p.c = Vector::Zero(3);
  SolverConfig cfg;
  cfg.beta = 1.0;
  cfg.h = {HSpec::explicit_matrix(Matrix::Identity(3, 3))};
  const ProximalMetric metric = assemble_metric(p, cfg);
  Matrix expected = Matrix::Zero(6, 6);
  expected.topLeftCorner(3, 3).setIdentity();
  expected.bottomRightCorner(3, 3).setIdentity();
  CHECK((metric.dense_g() - expected).norm() <= 1e-12);
}

TEST_CASE("assemble_metric two-block pattern matches the block formula") {
  // l = 2, A2 = I, H2 = I, beta = 1: lower-right pattern [[I+I, -I], [-I, I]]
  Philox rng(200, 0);
  BlockProblem p;
  Block b1, b2;
  b1.A = random_matrix(rng, 2, 2);
  b1.f = BlockObjective::zero();
  b2.A = Matrix::Identity(2, 2);
  b2.f = BlockObjective::zero();
  p.blocks = {b1, b2};
  p.c = Vector::Zero(2);
  SolverConfig cfg;
  cfg.beta = 1.0;
  cfg.h = {HSpec::explicit_matrix(Matrix::Identity(2, 2)),
           HSpec::explicit_matrix(Matrix::Identity(2, 2))};
  const Matrix g = assemble_metric(p, cfg).dense_g();
  CHECK((g.block(2, 2, 2, 2) - 2.0 * Matrix::Identity(2, 2)).norm() <= 1e-12);
  CHECK((g.block(2, 4, 2, 2) + Matrix::Identity(2, 2)).norm() <= 1e-12);
  CHECK((g.block(4, 2, 2, 2) + Matrix::Identity(2, 2)).norm() <= 1e-12);
  CHECK((g.block(4, 4, 2, 2) - Matrix::Identity(2, 2)).norm() <= 1e-12);
}

TEST_CASE("dense G agrees with the blockwise quadratic form") {
  Philox rng(201, 0);
  for (int trial = 0; trial < 20; ++trial) {
    BlockProblem p = quadratic_problem(rng, 3, 4, 5);
    SolverConfig cfg = oracle_config(p);
    const ProximalMetric metric = assemble_metric(p, cfg);
    const Matrix g = metric.dense_g();
    const Matrix g2 = metric.dense_g2();
    for (int probe = 0; probe < 10; ++probe) {
      Point w = Point::zero(p);
      Vector stacked = random_vector(rng, p.n() + p.m(), -2.0, 2.0);
      Index off = 0;
      for (Index j = 0; j < p.l(); ++j) {
        w.x[static_cast<std::size_t>(j)] = stacked.segment(off, p.dim(j));
        off += p.dim(j);
      }
      w.z = stacked.tail(p.m());
      const double scale = 100.0 * std::max(1.0, stacked.squaredNorm());
      CHECK(std::abs(metric.quad_g(w) - stacked.dot(g * stacked)) <= 1e-12 * scale);
      CHECK(std::abs(metric.quad_g2(w) - stacked.dot(g2 * stacked)) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("verify_assumptions on prox-linear and degenerate H") {
  Philox rng(202, 0);
  BlockProblem p = quadratic_problem(rng, 3, 4, 5);

  SolverConfig good = oracle_config(p);
  const AssumptionReport rep = verify_assumptions(assemble_metric(p, good));
  CHECK(rep.g_psd);
  CHECK(rep.g2_psd);
  CHECK(rep.strong_condition);

  SolverConfig zero_h;
  zero_h.beta = 1.0;
  for (Index j = 0; j < 3; ++j)
    zero_h.h.push_back(HSpec::explicit_matrix(Matrix::Zero(p.dim(j), p.dim(j))));
  const AssumptionReport rep0 = verify_assumptions(assemble_metric(p, zero_h));
  CHECK_FALSE(rep0.strong_condition);
}

TEST_CASE("verify_assumptions standard-proximal PSD check") {
  Philox rng(203, 0);
  for (int trial = 0; trial < 5; ++trial) {
    BlockProblem p = quadratic_problem(rng, 3, 4, 5);
    SolverConfig cfg;
    cfg.beta = 1.0;
    for (Index j = 0; j < 3; ++j) {
      const double nrm = spectral_norm(p.A(j));
      cfg.h.push_back(HSpec::standard(0.9 / ((p.l() - 2) * nrm * nrm)));
    }
    const ProximalMetric metric = assemble_metric(p, cfg);
    Eigen::SelfAdjointEigenSolver<Matrix> es_g(symmetrize(metric.dense_g()),
                                               Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Matrix> es_g2(symmetrize(metric.dense_g2()),
                                                Eigen::EigenvaluesOnly);
    CHECK(es_g.eigenvalues().minCoeff() >= -1e-10);
    CHECK(es_g2.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("step_size schedules") {
  Trace empty;
  CHECK(step_size(Schedule::constant(0.25), 0, empty) == 0.25);
  CHECK(step_size(Schedule::constant(0.25), 999, empty) == 0.25);
  CHECK(step_size(Schedule::piecewise_down(), 7, empty) == doctest::Approx(1.0 / 3.0));
  CHECK(step_size(Schedule::piecewise_down(), 0, empty) == doctest::Approx(1.0));
  CHECK(step_size(Schedule::piecewise_up(), 7, empty) == doctest::Approx(0.0));
  CHECK(step_size(Schedule::zero(), 3, empty) == 0.0);

  // adaptive: min{1/3, (k ||dw||_G)^-2}
  Trace h;
  TraceRecord rec;
  rec.gnorm_delta = 10.0;
  h.records.push_back(rec);
  CHECK(step_size(Schedule::adaptive(), 2, h) == doctest::Approx(1.0 / 400.0));
  CHECK(step_size(Schedule::adaptive(), 0, empty) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("inertial_extrapolate") {
  Philox rng(204, 0);
  BlockProblem p = quadratic_problem(rng, 2, 3, 4);
  Iterate it = Iterate::start(p, Point::zero(p));
  Point u = Point::zero(p);
  u.x[0] = random_vector(rng, 3);
  u.z = random_vector(rng, 4);
  it.w = u;

  // w_prev = 0, alpha = 1/4: w_bar = 1.25 u
  Point bar = inertial_extrapolate(it, 0.25);
  CHECK(dist2(bar, u.scaled(1.25)) <= 1e-15);

  // alpha = 0 leaves w
  CHECK(dist2(inertial_extrapolate(it, 0.0), u) == 0.0);

  // w == w_prev: any alpha leaves w
  it.w_prev = u;
  CHECK(dist2(inertial_extrapolate(it, 0.7), u) == 0.0);
}

TEST_CASE("iadmm fixed point at zero") {
  // all f_j = 0, c = 0, start at 0: every update returns 0
  Philox rng(205, 0);
  BlockProblem p = quadratic_problem(rng, 3, 4, 5);
  for (auto& b : p.blocks) b.f = BlockObjective::zero();
  p.c.setZero();
  SolverConfig cfg = oracle_config(p);
  cfg.max_iter = 5;
  const RunResult res = run(p, cfg);
  CHECK(res.solution.sq_norm() == 0.0);
}

TEST_CASE("alpha == 0 reproduces the plain Prox-ADMM trajectory bitwise") {
  Philox rng(206, 0);
  BlockProblem p = quadratic_problem(rng, 3, 4, 5);
  SolverConfig cfg = oracle_config(p);
  cfg.schedule = Schedule::zero();
  cfg.max_iter = 200;
  cfg.epsilon = 1e-30;
  const RunResult inertial = run(p, cfg);
  const RunResult plain = run_plain(p, cfg);
  REQUIRE(inertial.trace.records.size() == plain.trace.records.size());
  CHECK(dist2(inertial.solution, plain.solution) == 0.0);
  for (std::size_t i = 0; i < inertial.trace.records.size(); ++i) {
    CHECK(inertial.trace.records[i].stop_residual == plain.trace.records[i].stop_residual);
    CHECK(inertial.trace.records[i].objective == plain.trace.records[i].objective);
  }
}

TEST_CASE("quadratic KKT oracle") {
  // f_j = 1/2 ||x_j||^2, A_j = I (l = 2): x1* = x2* = c/2, z* = c/2
  BlockProblem p;
  for (int j = 0; j < 2; ++j) {
    Block b;
    b.A = Matrix::Identity(4, 4);
    b.f = BlockObjective::quadratic(Matrix::Identity(4, 4), Vector::Zero(4));
    p.blocks.push_back(b);
  }
  Philox rng(207, 0);
  p.c = random_vector(rng, 4);
  const Point w = quadratic_kkt_oracle(p);
  CHECK((w.x[0] - p.c / 2).norm() <= 1e-12);
  CHECK((w.x[1] - p.c / 2).norm() <= 1e-12);
  CHECK((w.z - p.c / 2).norm() <= 1e-12);

  // c = 0, q = 0 gives w* = 0
  p.c.setZero();
  CHECK(quadratic_kkt_oracle(p).sq_norm() == 0.0);

  // random 3-block: KKT residual by back-substitution
  for (int trial = 0; trial < 10; ++trial) {
    BlockProblem q = quadratic_problem(rng, 3, 5, 7);
    const Point w3 = quadratic_kkt_oracle(q);
    Vector feas = -q.c;
    for (Index j = 0; j < 3; ++j) feas += q.A(j) * w3.x[static_cast<std::size_t>(j)];
    CHECK(feas.norm() <= 1e-10);
    for (Index j = 0; j < 3; ++j) {
      const auto& f = q.blocks[static_cast<std::size_t>(j)].f;
      const Vector grad =
          f.Q * w3.x[static_cast<std::size_t>(j)] + f.q - q.A(j).transpose() * w3.z;
      CHECK(grad.norm() <= 1e-10 * std::max(1.0, w3.z.norm()));
    }
  }

  // non-quadratic block is rejected
  BlockProblem bad = quadratic_problem(rng, 2, 3, 3);
  bad.blocks[1].f = BlockObjective::l1(1.0);
  CHECK_THROWS_AS(quadratic_kkt_oracle(bad), OracleUnavailable);
}

TEST_CASE("two-block quadratic convergence to the KKT point") {
  Philox rng(208, 0);
  BlockProblem p = quadratic_problem(rng, 2, 6, 4);
  const Point wstar = quadratic_kkt_oracle(p);
  SolverConfig cfg = oracle_config(p);
  cfg.max_iter = 5000;
  cfg.epsilon = 1e-22;
  const RunResult res = run(p, cfg, wstar);
  CHECK(dist2(res.solution, wstar) <= 1e-6);
}

TEST_CASE("block updates satisfy first-order optimality") {
  Philox rng(209, 0);
  BlockProblem p = quadratic_problem(rng, 3, 4, 5);
  p.blocks[1].f = BlockObjective::l1(0.7);
  p.blocks[2].f = BlockObjective::linf(0.3);
  SolverConfig cfg = oracle_config(p);
  const ProximalMetric metric = assemble_metric(p, cfg);

  Iterate it = Iterate::start(p, Point::zero(p));
  for (int k = 0; k < 5; ++k) {
    it.k = k;
    it.w_bar = inertial_extrapolate(it, 0.25);
    Iterate next = iadmm_iterate(it, p, cfg, metric);

    // block 1 solved against (x_bar_2.., z_bar)
    Vector r1 = -p.c;
    for (Index j = 1; j < 3; ++j) r1 += p.A(j) * it.w_bar.x[static_cast<std::size_t>(j)];
    CHECK(block_optimality_residual(p, metric, 0, next.w.x[0], it.w_bar.x[0], it.w_bar.z, r1) <=
          1e-9);
    // blocks j >= 2 against (x_1^{k+1}, x_bar others, z^{k+1})
    for (Index i = 1; i < 3; ++i) {
      Vector ri = p.A(0) * next.w.x[0] - p.c;
      for (Index j = 1; j < 3; ++j)
        if (j != i) ri += p.A(j) * it.w_bar.x[static_cast<std::size_t>(j)];
      CHECK(block_optimality_residual(p, metric, i, next.w.x[static_cast<std::size_t>(i)],
                                      it.w_bar.x[static_cast<std::size_t>(i)], next.w.z,
                                      ri) <= 1e-9);
    }
    it = next;
  }
}

TEST_CASE("unsupported objective/H combination is reported with the block") {
  Philox rng(210, 0);
  BlockProblem p = quadratic_problem(rng, 2, 3, 3);
  p.blocks[1].f = BlockObjective::l1(1.0);
  SolverConfig cfg;
  cfg.beta = 1.0;
  cfg.h = {HSpec::standard(0.1), HSpec::standard(0.1)};  // no closed form for l1
  cfg.max_iter = 3;
  cfg.epsilon = 1e-8;
  try {
    run(p, cfg);
    FAIL("expected InvalidArgument");
  } catch (const InvalidArgument& ex) {
    CHECK(std::string(ex.what()).find("block 1") != std::string::npos);
  }
}

TEST_CASE("stopping residual identities") {
  Philox rng(211, 0);
  // w^{k+1} == w_bar^k gives residual 0
  BlockProblem p = quadratic_problem(rng, 3, 4, 5);
  SolverConfig cfg = oracle_config(p);
  const ProximalMetric metric = assemble_metric(p, cfg);
  Iterate it = Iterate::start(p, Point::zero(p));
  it.w_bar = it.w;
  CHECK(stopping_residual(it, p, metric) == 0.0);

  // l = 1, H1 = I, beta = 1: reduces to ||dx||^2 + ||dz||^2
  BlockProblem p1;
  Block b;
  b.A = random_matrix(rng, 4, 4);
  b.f = BlockObjective::zero();
  p1.blocks.push_back(b);
  p1.c = Vector::Zero(4);
  SolverConfig cfg1;
  cfg1.beta = 1.0;
  cfg1.h = {HSpec::explicit_matrix(Matrix::Identity(4, 4))};
  const ProximalMetric metric1 = assemble_metric(p1, cfg1);
  Iterate it1 = Iterate::start(p1, Point::zero(p1));
  it1.w.x[0] = random_vector(rng, 4);
  it1.w.z = random_vector(rng, 4);
  CHECK(stopping_residual(it1, p1, metric1) ==
        doctest::Approx(it1.w.x[0].squaredNorm() + it1.w.z.squaredNorm()));

  // residual >= ||w^{k+1} - w_bar||_G^2 (dense check)
  const Matrix g = metric.dense_g();
  for (int trial = 0; trial < 50; ++trial) {
    Iterate itr = Iterate::start(p, Point::zero(p));
    for (auto& xj : itr.w.x) xj = random_vector(rng, xj.size());
    itr.w.z = random_vector(rng, 5);
    Vector stacked(p.n() + p.m());
    Index off = 0;
    for (const auto& xj : itr.w.x) {
      stacked.segment(off, xj.size()) = xj;
      off += xj.size();
    }
    stacked.tail(p.m()) = itr.w.z;
    CHECK(stopping_residual(itr, p, metric) >= stacked.dot(g * stacked) - 1e-10);
  }
}

TEST_CASE("z-update identity holds along the run") {
  Philox rng(212, 0);
  BlockProblem p = quadratic_problem(rng, 3, 4, 5);
  SolverConfig cfg = oracle_config(p);
  const ProximalMetric metric = assemble_metric(p, cfg);
  Iterate it = Iterate::start(p, Point::zero(p));
  for (int k = 0; k < 30; ++k) {
    it.k = k;
    it.w_bar = inertial_extrapolate(it, 0.25);
    Iterate next = iadmm_iterate(it, p, cfg, metric);
    Vector lhs = -p.c;
    for (Index j = 0; j < 3; ++j) lhs += p.A(j) * next.w.x[static_cast<std::size_t>(j)];
    Vector rhs = -(next.w.z - it.w_bar.z) / cfg.beta;
    for (Index j = 1; j < 3; ++j)
      rhs +=
          p.A(j) * (next.w.x[static_cast<std::size_t>(j)] - it.w_bar.x[static_cast<std::size_t>(j)]);
    CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, lhs.norm()));
    it = next;
  }
}

TEST_CASE("feasible trivial problem terminates feasible") {
  Philox rng(213, 0);
  BlockProblem p = quadratic_problem(rng, 2, 4, 3);
  for (auto& b : p.blocks) b.f = BlockObjective::zero();
  SolverConfig cfg = oracle_config(p);
  cfg.epsilon = 1e-18;
  const RunResult res = run(p, cfg);
  CHECK(res.trace.records.back().feasibility <= 1e-8);
}

TEST_CASE("objective converges to the optimal value on a 3-block oracle problem") {
  Philox rng(214, 0);
  BlockProblem p = quadratic_problem(rng, 3, 5, 6);
  const Point wstar = quadratic_kkt_oracle(p);
  const ProximalMetric metric = assemble_metric(p, oracle_config(p));
  const double theta_star = metric.theta(wstar);
  SolverConfig cfg = oracle_config(p);
  cfg.max_iter = 8000;
  cfg.epsilon = 1e-22;
  const RunResult res = run(p, cfg, wstar);
  CHECK(std::abs(res.trace.records.back().objective - theta_star) <= 1e-6);
}

TEST_CASE("monotone schedule bound, mu-monotonicity and gap bound") {
  Philox rng(215, 0);
  for (int trial = 0; trial < 3; ++trial) {
    BlockProblem p = quadratic_problem(rng, 3, 4, 5);
    const Point wstar = quadratic_kkt_oracle(p);
    SolverConfig cfg = oracle_config(p);
    const ProximalMetric metric = assemble_metric(p, cfg);
    cfg.max_iter = 3000;

    // monotone alpha_k = 0.3 (1 - 2^-k), capped by alpha = 0.3 < 1/3
    const double alpha_cap = 0.3;
    const Point w0 = Point::zero(p);
    const double g0 = metric.quad_g(w0 - wstar);

    Iterate it = Iterate::start(p, w0);
    double accum = 0.0;
    double prev_mu = std::numeric_limits<double>::infinity();
    for (int k = 0; k < cfg.max_iter; ++k) {
      const double ak = alpha_cap * (1.0 - std::pow(2.0, -k));
      it.k = k;
      it.w_bar = inertial_extrapolate(it, ak);
      Iterate next = iadmm_iterate(it, p, cfg, metric);

      accum += ak * metric.quad_g(it.w - it.w_prev);
      CHECK(accum <= alpha_cap / ((1.0 - 3.0 * alpha_cap) * (1.0 - alpha_cap)) * g0 + 1e-10);

      // mu_k nonincreasing
      const double mu = metric.quad_g(next.w - wstar) - ak * metric.quad_g(it.w - wstar) +
                        2.0 * ak * metric.quad_g(next.w - it.w);
      if (k >= 1) CHECK(mu <= prev_mu + 1e-8);
      prev_mu = mu;

      // objective gap bound
      const double gap = std::abs(metric.theta(next.w) - metric.theta(wstar));
      const double bound = (std::sqrt(metric.quad_g(next.w - wstar)) + wstar.z.norm()) *
                           std::sqrt(metric.quad_g(next.w - it.w_bar));
      CHECK(gap <= bound + 1e-8);

      it = next;
      if (metric.quad_g(it.w - it.w_bar) < 1e-26 && k > 50) break;
    }
  }
}

TEST_CASE("feasibility square-summability bound (monotone schedule)") {
  Philox rng(216, 0);
  BlockProblem p = quadratic_problem(rng, 3, 4, 5);
  const Point wstar = quadratic_kkt_oracle(p);
  SolverConfig cfg = oracle_config(p);
  const ProximalMetric metric = assemble_metric(p, cfg);
  const double alpha = 0.3;
  cfg.schedule = Schedule::constant(alpha);
  cfg.max_iter = 4000;
  cfg.epsilon = 1e-24;
  const RunResult res = run(p, cfg, wstar);
  const double g0 = metric.quad_g(Point::zero(p) - wstar);
  double sum_feas2 = 0.0;
  for (const auto& rec : res.trace.records) sum_feas2 += rec.feasibility * rec.feasibility;
  const double bound =
      (alpha * (1 + alpha) / ((1 - 3 * alpha) * (1 - alpha) * (1 - alpha)) + 1.0) / cfg.beta * g0;
  CHECK(sum_feas2 <= bound + 1e-8);
}

TEST_CASE("G-distance to the KKT point stabilizes (windowed convergence)") {
  Philox rng(217, 0);
  BlockProblem p = quadratic_problem(rng, 3, 4, 5);
  const Point wstar = quadratic_kkt_oracle(p);
  SolverConfig cfg = oracle_config(p);
  cfg.max_iter = 6000;
  cfg.epsilon = 1e-26;
  const RunResult res = run(p, cfg, wstar);
  const auto& recs = res.trace.records;
  REQUIRE(recs.size() >= 200);
  double tv = 0.0;
  for (std::size_t i = recs.size() - 100; i < recs.size(); ++i)
    tv += std::abs(recs[i].gnorm_to_oracle - recs[i - 1].gnorm_to_oracle);
  CHECK(tv < 1e-4);
}

TEST_CASE("boundedness bound of the iterate norms") {
  Philox rng(218, 0);
  BlockProblem p = quadratic_problem(rng, 3, 4, 5);
  const Point wstar = quadratic_kkt_oracle(p);
  SolverConfig cfg = oracle_config(p);
  const ProximalMetric metric = assemble_metric(p, cfg);
  const double alpha = 0.25;
  cfg.max_iter = 3000;

  const double beta = cfg.beta;
  const Point w0 = Point::zero(p);
  const double g0 = metric.quad_g(w0 - wstar);

  Iterate it = Iterate::start(p, w0);
  double sum_alpha_moves = 0.0;
  double lhs_sup = 0.0;
  for (int k = 0; k < cfg.max_iter; ++k) {
    it.k = k;
    it.w_bar = inertial_extrapolate(it, alpha);
    Iterate next = iadmm_iterate(it, p, cfg, metric);
    sum_alpha_moves += alpha * metric.quad_g(it.w - it.w_prev);

    double lhs = next.w.z.squaredNorm() / beta;
    for (Index j = 0; j < 3; ++j) {
      const Vector& xj = next.w.x[static_cast<std::size_t>(j)];
      lhs += xj.dot(metric.H(j) * xj) + beta * (p.A(j) * xj).squaredNorm();
    }
    lhs_sup = std::max(lhs_sup, lhs);
    it = next;
  }
  const Vector a1x1 = p.A(0) * wstar.x[0];
  const double h1x1 = wstar.x[0].dot(metric.H(0) * wstar.x[0]);
  const double rhs = 30 * beta * a1x1.squaredNorm() + 12 * beta * h1x1 +
                     36 * beta * p.c.squaredNorm() + 30 / beta * wstar.z.squaredNorm() +
                     100 * metric.quad_g(wstar) + 142 * g0 +
                     142 * (1 + alpha) / (1 - alpha) * sum_alpha_moves;
  CHECK(lhs_sup <= rhs);
}

TEST_CASE("divergence guard aborts with diagnostics") {
  Philox rng(219, 0);
  BlockProblem p = quadratic_problem(rng, 3, 4, 5);
  SolverConfig cfg = oracle_config(p);
  cfg.schedule = Schedule::constant(0.9);  // far beyond any convergent range
  cfg.max_iter = 20000;
  cfg.epsilon = 1e-30;
  CHECK_THROWS_AS(run(p, cfg), NumericFailure);
}

TEST_CASE("trace CSV structure") {
  Philox rng(220, 0);
  BlockProblem p = quadratic_problem(rng, 2, 3, 3);
  SolverConfig cfg = oracle_config(p);
  cfg.max_iter = 50;
  cfg.epsilon = 1e-30;
  const RunResult res = run(p, cfg);
  const std::string path = "/tmp/liftadmm_trace_test.csv";
  res.trace.to_csv(path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "k,alpha_k,stop_residual,feasibility,objective,gnorm_step,gnorm_to_oracle");
  int lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 50);
}
