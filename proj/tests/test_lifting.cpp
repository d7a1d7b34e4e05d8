#include "liftadmm/lifting.hpp"

#include "liftadmm/kernel.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace liftadmm;
using test_util::random_matrix;
using test_util::random_symmetric;
using test_util::random_vector;

namespace {

LiftedInstance random_instance(Philox& rng, Index n, Index m) {
  const Matrix A = random_matrix(rng, m, n);
  Vector b(m);
  for (Index i = 0; i < m; ++i) b[i] = rng.uniform(-1.0, 1.0) * rng.normal();
  const Vector bbar = random_vector(rng, m, 0.0, 2.0);
  return build_instance(A, b, bbar);
}

}  // namespace

TEST_CASE("lift_forward basics") {
  Philox rng(300, 0);
  const LiftedInstance inst = random_instance(rng, 6, 10);

  CHECK(lift_forward(inst, Matrix::Zero(6, 6)).norm() == 0.0);

  Vector x = random_vector(rng, 6);
  const Vector fx = lift_forward(inst, Matrix(x * x.transpose()));
  const Vector expect = (inst.A * x).cwiseAbs2();
  CHECK((fx - expect).lpNorm<Eigen::Infinity>() <= 1e-12);

  // entrywise <a_i a_i^T, X> via dense outer products
  const Matrix X = random_symmetric(rng, 6);
  const Vector fX = lift_forward(inst, X);
  for (Index i = 0; i < 10; ++i) {
    const Matrix outer = inst.A.row(i).transpose() * inst.A.row(i);
    CHECK(std::abs(fX[i] - (outer.array() * X.array()).sum()) <= 1e-10);
  }
}

TEST_CASE("lift_adjoint basics and adjointness") {
  Philox rng(301, 0);
  const LiftedInstance inst = random_instance(rng, 5, 8);

  const Matrix a1 = lift_adjoint(inst, Vector::Unit(8, 0)).mat();
  CHECK((a1 - inst.A.row(0).transpose() * inst.A.row(0)).norm() <= 1e-12);
  CHECK(lift_adjoint(inst, Vector::Zero(8)).mat().norm() == 0.0);

  for (int trial = 0; trial < 200; ++trial) {
    const Matrix X = random_symmetric(rng, 5);
    const Vector coeff = random_vector(rng, 8, -2.0, 2.0);
    const double lhs = lift_forward(inst, X).dot(coeff);
    const double rhs = (lift_adjoint(inst, coeff).mat().array() * X.array()).sum();
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("build_instance data") {
  Philox rng(302, 0);
  // b = 0: B = 0, c = bbar
  {
    const Matrix A = random_matrix(rng, 4, 3);
    const Vector bbar = random_vector(rng, 4);
    const LiftedInstance inst = build_instance(A, Vector::Zero(4), bbar);
    CHECK(inst.B.norm() == 0.0);
    CHECK((inst.c - bbar).norm() == 0.0);
  }
  // m = 1, a1 = e1, b1 = 1, x = e1: bbar = 4, c = 3, B x = 2
  {
    Matrix A(1, 2);
    A << 1, 0;
    Vector b(1);
    b << 1;
    Vector x(2);
    x << 1, 0;
    const Vector bbar = (A * x + b).cwiseAbs2();
    CHECK(bbar[0] == doctest::Approx(4.0));
    const LiftedInstance inst = build_instance(A, b, bbar);
    CHECK(inst.c[0] == doctest::Approx(3.0));
    CHECK((inst.B * x)[0] == doctest::Approx(2.0));
  }
  // noiseless regeneration: c + |b|^2 == |A x + b|^2
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix A = random_matrix(rng, 12, 5);
    Vector b(12);
    for (Index i = 0; i < 12; ++i) b[i] = rng.uniform(-1.0, 1.0) * rng.normal();
    const Vector x = random_vector(rng, 5);
    const Vector bbar = (A * x + b).cwiseAbs2();
    const LiftedInstance inst = build_instance(A, b, bbar);
    const Vector lhs = inst.c + b.cwiseAbs2();
    CHECK((lhs - bbar).lpNorm<Eigen::Infinity>() <= 1e-12);
    for (Index i = 0; i < 12; ++i)
      CHECK((inst.B.row(i) - 2.0 * b[i] * A.row(i)).norm() <= 1e-14);
  }
}

TEST_CASE("cached norms match direct computation") {
  Philox rng(303, 0);
  const LiftedInstance inst = random_instance(rng, 6, 12);
  CHECK(inst.norm_BtB ==
        doctest::Approx(spectral_norm(Matrix(inst.B.transpose() * inst.B))).epsilon(1e-6));
  const double direct = operator_norm(
      [&](const Matrix& W) {
        return Matrix(lift_adjoint(inst, lift_forward(inst, W)).mat() + 4.0 * W);
      },
      6, PowerIterOptions{1e-10, 2000, 999});
  CHECK(inst.norm_AA4 == doctest::Approx(direct).epsilon(1e-5));
}

TEST_CASE("default_etas fixed examples") {
  LiftedInstance inst;
  inst.norm_BtB = 4.0;
  inst.norm_AA4 = 10.0;
  const CapRealEtas cap = default_etas(inst, LiftedVariant::kCapReal);
  CHECK(cap.eta1 == doctest::Approx(0.2375));
  CHECK(cap.eta2 == doctest::Approx(0.19));
  CHECK(cap.eta3 == doctest::Approx(0.19));

  const CapRealEtas pc = default_etas(inst, LiftedVariant::kPCapReal);
  CHECK(pc.eta1 == doctest::Approx(0.95));
  CHECK(pc.eta2 == doctest::Approx(0.95 * 4.0 / 30.0));
  CHECK(pc.eta3 == doctest::Approx(0.95 * 4.0 / 30.0));
  CHECK(pc.eta4 == doctest::Approx(0.95 / 12.0));

  LiftedInstance degenerate;
  degenerate.norm_BtB = 0.0;
  degenerate.norm_AA4 = 0.0;
  CHECK_THROWS_AS(default_etas(degenerate, LiftedVariant::kCapReal), InvalidArgument);
}

TEST_CASE("default etas certify G PSD on the induced dense problem") {
  Philox rng(304, 0);
  for (auto variant : {LiftedVariant::kCapReal, LiftedVariant::kPCapReal}) {
    const LiftedInstance inst = random_instance(rng, 5, 8);
    const CapRealEtas etas = default_etas(inst, variant);
    const BlockProblem p = induced_block_problem(inst, variant, 1.0, 1.0, 1.0);
    SolverConfig cfg;
    cfg.beta = 1.0;
    cfg.h = induced_h_specs(inst, variant, etas);
    const AssumptionReport rep = verify_assumptions(assemble_metric(p, cfg));
    CHECK(rep.g_psd);
    CHECK(rep.g2_psd);
    CHECK(rep.strong_condition);
  }
}

TEST_CASE("induced problem constraint matches the operator form") {
  Philox rng(305, 0);
  const LiftedInstance inst = random_instance(rng, 4, 6);
  const BlockProblem p = induced_block_problem(inst, LiftedVariant::kCapReal, 1.0, 1.0, 1.0);
  REQUIRE(p.l() == 3);
  const Matrix X = random_symmetric(rng, 4);
  const Matrix Y = random_symmetric(rng, 4);
  const Vector x = random_vector(rng, 4);
  const Eigen::Map<const Vector> vecX(X.data(), 16), vecY(Y.data(), 16);
  const Vector lhs = p.A(0) * x + p.A(1) * vecX + p.A(2) * vecY;
  Vector expect(6 + 16);
  expect.head(6) = 0.5 * lift_forward(inst, X) + 0.5 * lift_forward(inst, Y) + inst.B * x;
  Eigen::Map<Matrix>(expect.tail(16).data(), 4, 4) = X - Y;
  CHECK((lhs - expect).lpNorm<Eigen::Infinity>() <= 1e-12);
}
