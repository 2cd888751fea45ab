#include <catch2/catch_amalgamated.hpp>

#include "accqp/padmm/diagnostics.hpp"
#include "accqp/padmm/iteration.hpp"
#include "helpers/test_problems.hpp"

using namespace accqp;
using namespace accqp::padmm;
using accqp::testing::DenseTwoBlock;
using accqp::testing::DetRng;

TEST_CASE("one hand-computed iterate of the scalar chain problem", "[padmm]") {
  DenseTwoBlock p = DenseTwoBlock::scalar_chain();
  PadmmIterate w0 = PadmmIterate::zero(1, 1, 1);

  auto [next, bar] = padmm_iterate(w0, p, 1.0, 1.0);
  CHECK(bar.z[0] == Catch::Approx(0.5).margin(1e-15));
  CHECK(bar.x[0] == Catch::Approx(-0.5).margin(1e-15));
  CHECK(bar.y[0] == Catch::Approx(0.5).margin(1e-15));
  CHECK(next.y[0] == bar.y[0]); // rho = 1: w_next = w_bar

  auto [next19, bar19] = padmm_iterate(w0, p, 1.0, 1.9);
  CHECK(next19.y[0] == Catch::Approx(1.9 * 0.5).margin(1e-15));
  CHECK(next19.x[0] == Catch::Approx(1.9 * -0.5).margin(1e-15));

  // w_bar is the KKT point: iterating from it is stationary
  auto [nn, bb] = padmm_iterate(bar, p, 1.0, 1.3);
  CHECK((bb.pack() - bar.pack()).norm() <= 1e-14);
  CHECK((nn.pack() - bar.pack()).norm() <= 1e-14);

  CHECK_THROWS_AS(padmm_iterate(w0, p, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(padmm_iterate(w0, p, 1.0, 2.1), ConfigError);
  CHECK_THROWS_AS(padmm_iterate(w0, p, 2.0, 1.0), ConfigError); // sigma mismatch
}

TEST_CASE("kkt_residual blocks", "[padmm]") {
  DenseTwoBlock p = DenseTwoBlock::scalar_chain();

  PadmmIterate origin = PadmmIterate::zero(1, 1, 1);
  KktResidual r0 = kkt_residual(origin, p);
  CHECK(r0.primal_y == 0.0); // prox_f1(0) = 0
  CHECK(r0.primal_z == 0.0);
  CHECK(r0.feasibility == Catch::Approx(1.0)); // |c - 0 - 0|
  CHECK(r0.aggregate == Catch::Approx(std::sqrt(r0.primal_y * r0.primal_y +
                                                r0.primal_z * r0.primal_z +
                                                r0.feasibility * r0.feasibility)));

  Vector wstar = p.kkt_solution();
  PadmmIterate star = PadmmIterate::unpack(wstar, 1, 1, 1);
  KktResidual rs = kkt_residual(star, p);
  CHECK(rs.aggregate <= 1e-12);

  // feasibility block equals c - B1 y - B2 z recomputed independently
  DetRng rng(2);
  DenseTwoBlock q = DenseTwoBlock::random(3, 4, 2, 8);
  Vector w(3 + 4 + 2);
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = rng.normal();
  PadmmIterate it = PadmmIterate::unpack(w, 3, 4, 2);
  KktResidual r = kkt_residual(it, q);
  CHECK(r.feasibility ==
        Catch::Approx((q.c - q.b1m * it.y - q.b2m * it.z).norm()).margin(1e-14));
}

TEST_CASE("objective gap values", "[padmm]") {
  DenseTwoBlock p = DenseTwoBlock::scalar_chain();
  Vector wstar = p.kkt_solution();
  PadmmIterate star = PadmmIterate::unpack(wstar, 1, 1, 1);
  const double optimal = p.f1(star.y) + p.f2(star.z);
  CHECK(optimal == Catch::Approx(0.25).margin(1e-14));
  CHECK(objective_gap(star, p, optimal) == Catch::Approx(0.0).margin(1e-14));

  PadmmIterate origin = PadmmIterate::zero(1, 1, 1);
  CHECK(objective_gap(origin, p, optimal) == Catch::Approx(-0.25).margin(1e-14));

  KktResidual with_gap = kkt_residual(origin, p, optimal);
  CHECK(with_gap.objective_gap == Catch::Approx(-0.25).margin(1e-14));
}

TEST_CASE("padmm coincides with the generic dppm iteration", "[padmm]") {
  for (unsigned seed : {1u, 2u, 3u}) {
    DenseTwoBlock p = DenseTwoBlock::random(4, 3, 2, seed, 0.7);
    PadmmResolvent<DenseTwoBlock> oracle(p);
    PadmmIterate w{Vector::Ones(4), Vector::Ones(3), Vector::Ones(2)};
    Vector wflat = w.pack();
    for (int k = 0; k < 100; ++k) {
      auto [next, bar] = padmm_iterate(w, p, p.sigma(), 1.6);
      Vector dflat = splitting::dppm_step(wflat, 1.6, oracle);
      CHECK((next.pack() - dflat).norm() <= 1e-12 * (1.0 + dflat.norm()));
      w = std::move(next);
      wflat = std::move(dflat);
    }
  }
}

TEST_CASE("resolvent output satisfies the preconditioned inclusion", "[padmm]") {
  // M(w - w_bar) must produce exactly the subgradients the substeps imply:
  // with T1 = T2 = 0 and smooth f_i, grad f1(y_bar) = -B1* x_bar + [M(w-w_bar)]_y
  // and grad f2(z_bar) = -B2* x_bar, plus the x-block identity.
  for (unsigned seed : {5u, 6u}) {
    DenseTwoBlock p = DenseTwoBlock::random(3, 4, 2, seed, 1.4);
    PadmmResolvent<DenseTwoBlock> oracle(p);
    DetRng rng(seed);
    PadmmIterate w{Vector::Zero(3), Vector::Zero(4), Vector::Zero(2)};
    for (Eigen::Index i = 0; i < 3; ++i) w.y[i] = rng.normal();
    for (Eigen::Index i = 0; i < 4; ++i) w.z[i] = rng.normal();
    for (Eigen::Index i = 0; i < 2; ++i) w.x[i] = rng.normal();

    PadmmIterate bar = oracle.resolvent(w);
    const double sigma = p.sigma();

    Vector vy = sigma * p.b1m.transpose() * (p.b1m * (w.y - bar.y)) +
                p.b1m.transpose() * (w.x - bar.x);
    Vector grad_f1 = p.p1 * bar.y + p.q1;
    CHECK((vy - p.b1_adj(bar.x) - grad_f1).norm() <= 1e-9 * (1.0 + grad_f1.norm()));

    Vector grad_f2 = p.p2 * bar.z + p.q2;
    CHECK((-p.b2_adj(bar.x) - grad_f2).norm() <= 1e-9 * (1.0 + grad_f2.norm()));

    Vector vx = p.b1m * (w.y - bar.y) + (w.x - bar.x) / sigma;
    Vector feas = p.c - p.b1m * bar.y - p.b2m * bar.z;
    CHECK((vx - feas).norm() <= 1e-9 * (1.0 + feas.norm()));
  }
}

TEST_CASE("feasibility identity of the multiplier step", "[padmm]") {
  DenseTwoBlock p = DenseTwoBlock::random(4, 5, 3, 12, 0.9);
  PadmmResolvent<DenseTwoBlock> oracle(p);
  PadmmIterate w{Vector::Ones(4), -Vector::Ones(5), Vector::Ones(3)};
  for (int k = 0; k < 60; ++k) {
    PadmmIterate bar = oracle.resolvent(w);
    const double lhs = (p.sig * (p.b1m * (bar.y - w.y)) + (bar.x - w.x)).norm();
    const double rhs = p.sig * (p.b1m * bar.y + p.b2m * bar.z - p.c).norm();
    CHECK(lhs == Catch::Approx(rhs).margin(1e-12 * (1.0 + rhs)));
    auto [next, b2] = padmm_iterate(w, p, p.sigma(), 1.5);
    w = std::move(next);
  }
}

TEST_CASE("accelerated padmm matches the engine and is stationary at KKT", "[padmm]") {
  DenseTwoBlock p = DenseTwoBlock::random(3, 3, 2, 9, 1.1);
  Vector wstar = p.kkt_solution();

  auto st = splitting::AccelState::start(wstar, 2.0, 2.0);
  for (int k = 0; k < 10; ++k) {
    auto res = acc_padmm_iterate(st, p);
    CHECK((res.state.w - wstar).norm() <= 1e-9 * (1.0 + wstar.norm()));
    st = std::move(res.state);
  }

  // identical to accel_step over the induced oracle
  PadmmResolvent<DenseTwoBlock> oracle(p);
  auto s1 = splitting::AccelState::start(Vector::Ones(wstar.size()), 2.5, 1.5);
  auto s2 = s1;
  for (int k = 0; k < 20; ++k) {
    auto a = acc_padmm_iterate(s1, p);
    auto b = splitting::accel_step(s2, oracle);
    CHECK((a.state.w - b.state.w).norm() == 0.0);
    s1 = std::move(a.state);
    s2 = std::move(b.state);
  }
}

TEST_CASE("accelerated run on the scalar chain meets the rate bound", "[padmm]") {
  // analytic fixed point (1/2, 1/2, -1/2)
  DenseTwoBlock p = DenseTwoBlock::scalar_chain();
  Vector wstar(3);
  wstar << 0.5, 0.5, -0.5;
  Vector w0 = Vector::Zero(3);
  PadmmResolvent<DenseTwoBlock> oracle(p);
  const double r0 = oracle.seminorm(w0 - wstar);
  auto st = splitting::AccelState::start(w0, 2.0, 2.0);
  for (int k = 0; k < 3000; ++k) {
    auto res = acc_padmm_iterate(st, p);
    CHECK((st.k + 1.0) * res.seminorm_residual <= 2.0 * r0 + 1e-8);
    st = std::move(res.state);
  }
  CHECK((oracle.apply(st.w) - wstar).norm() <= 1e-3);
}

TEST_CASE("M-firm nonexpansiveness of the induced resolvent", "[padmm]") {
  for (unsigned seed : {31u, 32u}) {
    DenseTwoBlock p = DenseTwoBlock::random(4, 4, 3, seed, 0.8);
    PadmmResolvent<DenseTwoBlock> oracle(p);
    DetRng rng(seed + 7);
    const Eigen::Index dim = oracle.dim();
    for (int trial = 0; trial < 50; ++trial) {
      Vector w1(dim), w2(dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        w1[i] = 3.0 * rng.normal();
        w2[i] = 3.0 * rng.normal();
      }
      Vector t1 = oracle.apply(w1);
      Vector t2 = oracle.apply(w2);
      const double lhs = std::pow(oracle.seminorm(t1 - t2), 2) +
                         std::pow(oracle.seminorm((w1 - t1) - (w2 - t2)), 2);
      const double rhs = std::pow(oracle.seminorm(w1 - w2), 2);
      CHECK(lhs <= rhs + 1e-10 * (1.0 + rhs));
    }
  }
}

TEST_CASE("power method estimates operator norms", "[padmm]") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(5, 5);
  d.diagonal() << 1.0, 2.0, 7.5, 0.3, 4.0;
  const double est =
      power_method([&d](const Eigen::VectorXd& v) { return Eigen::VectorXd(d * v); }, 5, 100, 3);
  CHECK(est == Catch::Approx(7.5).epsilon(1e-6));
  CHECK(power_method([](const Eigen::VectorXd& v) { return v; }, 0) == 0.0);
}
