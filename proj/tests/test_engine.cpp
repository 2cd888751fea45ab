#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "accqp/splitting/engine.hpp"
#include "helpers/oracles.hpp"

using namespace accqp;
using namespace accqp::splitting;
using accqp::testing::AffineOracle;
using accqp::testing::DetRng;

TEST_CASE("dppm_step basics", "[splitting]") {
  AffineOracle oracle = AffineOracle::make(8, 42, false);
  const Vector& wstar = oracle.fixed_point();

  for (double rho : {0.3, 1.0, 1.9})
    CHECK((dppm_step(wstar, rho, oracle) - wstar).norm() <= 1e-10 * (1.0 + wstar.norm()));

  DetRng rng(1);
  Vector w(8);
  for (int i = 0; i < 8; ++i) w[i] = rng.normal();
  CHECK((dppm_step(w, 1.0, oracle) - oracle.apply(w)).norm() == 0.0);

  CHECK_THROWS_AS(dppm_step(w, 0.0, oracle), ConfigError);
  CHECK_THROWS_AS(dppm_step(w, 2.0, oracle), ConfigError);
  CHECK_THROWS_AS(dppm_step(Vector::Zero(3), 1.0, oracle), DimensionError);
}

TEST_CASE("dppm_step on a scalar affine contraction", "[splitting]") {
  AffineOracle half = AffineOracle::contraction(2, 0.5);
  Vector w(2);
  w << 1.0, 0.0;
  Vector next = dppm_step(w, 1.9, half);
  CHECK(next[0] == Catch::Approx(0.05).margin(1e-15));
  CHECK(next[1] == 0.0);
}

TEST_CASE("dppm iteration converges on random affine monotone inclusions", "[splitting]") {
  for (unsigned seed : {10u, 11u, 12u, 13u}) {
    AffineOracle oracle = AffineOracle::make(12, seed, seed % 2 == 0, 0.3);
    Vector w = Vector::Ones(12);
    const double rho = 1.5;
    double res = 1.0;
    for (int k = 0; k < 100000 && res >= 1e-8; ++k) {
      Vector next = dppm_step(w, rho, oracle);
      res = oracle.seminorm(w - oracle.apply(w));
      w = next;
    }
    CHECK(res < 1e-8);
  }
}

TEST_CASE("accel_step is stationary at a fixed point", "[splitting]") {
  AffineOracle oracle = AffineOracle::make(6, 5, true);
  AccelState st = AccelState::start(oracle.fixed_point(), 2.0, 2.0);
  for (int k = 0; k < 25; ++k) {
    auto res = accel_step(st, oracle);
    CHECK((res.state.w - oracle.fixed_point()).norm() <= 1e-9 * (1.0 + oracle.fixed_point().norm()));
    CHECK(res.seminorm_residual <= 1e-9);
    st = std::move(res.state);
  }
}

TEST_CASE("alpha=2 reproduces the Halpern iteration exactly", "[splitting]") {
  for (unsigned seed : {3u, 4u}) {
    AffineOracle oracle = AffineOracle::make(10, seed, seed % 2 == 0);
    DetRng rng(seed);
    Vector w0(10);
    for (int i = 0; i < 10; ++i) w0[i] = rng.normal();
    AccelState st = AccelState::start(w0, 2.0, 1.7);
    for (int k = 0; k < 500; ++k) {
      auto res = accel_step(st, oracle);
      const double kk = static_cast<double>(st.k);
      // w^{k+1} = w0 / (k+2) + (k+1)/(k+2) what^{k+1}
      Vector halpern = w0 / (kk + 2.0) + ((kk + 1.0) / (kk + 2.0)) * res.state.w_hat;
      CHECK((res.state.w - halpern).norm() <= 1e-10 * (1.0 + w0.norm()));
      // s^k = (k+1) w^k - k what^k stays at w0
      Vector s = (kk + 1.0) * st.w - kk * st.w_hat;
      CHECK((s - w0).norm() <= 1e-10 * (1.0 + w0.norm()));
      st = std::move(res.state);
    }
  }
}

TEST_CASE("alpha=2 rate bound and Fejer monotonicity", "[splitting]") {
  for (unsigned seed : {21u, 22u, 23u}) {
    AffineOracle oracle = AffineOracle::make(14, seed, true);
    DetRng rng(seed + 100);
    Vector w0(14);
    for (int i = 0; i < 14; ++i) w0[i] = rng.normal();
    const double r0 = oracle.seminorm(w0 - oracle.fixed_point());
    AccelState st = AccelState::start(w0, 2.0, 2.0);
    for (int k = 0; k < 2000; ++k) {
      auto res = accel_step(st, oracle);
      CHECK((st.k + 1.0) * res.seminorm_residual <= 2.0 * r0 + 1e-8);
      CHECK(oracle.seminorm(st.w - oracle.fixed_point()) <= r0 + 1e-8);
      st = std::move(res.state);
    }
  }
}

TEST_CASE("seminorm_residual agrees with the step computation", "[splitting]") {
  AffineOracle oracle = AffineOracle::make(9, 77, false);
  Vector w0 = Vector::Ones(9);
  AccelState st = AccelState::start(w0, 3.0, 1.5);
  for (int k = 0; k < 10; ++k) {
    const double direct = seminorm_residual(st, oracle);
    auto res = accel_step(st, oracle);
    CHECK(direct == Catch::Approx(res.seminorm_residual).margin(1e-14));
    st = std::move(res.state);
  }
  CHECK(seminorm_residual(AccelState::start(oracle.fixed_point(), 2.0, 1.0), oracle) <= 1e-10);
}

TEST_CASE("alpha>2 residual decays faster than 1/k", "[splitting]") {
  // o(1/k): the least-squares slope of log((k+1) * residual) against log k
  // over the tail must be clearly negative.
  AffineOracle oracle = AffineOracle::contraction(10, 0.95);
  Vector w0 = 3.0 * Vector::Ones(10);
  AccelState st = AccelState::start(w0, 3.0, 1.8);
  std::vector<double> lx, ly;
  for (int k = 0; k < 20000; ++k) {
    auto res = accel_step(st, oracle);
    const double scaled = (st.k + 1.0) * res.seminorm_residual;
    if (st.k >= 1000 && scaled > 0.0) {
      lx.push_back(std::log(double(st.k)));
      ly.push_back(std::log(scaled));
    }
    st = std::move(res.state);
  }
  REQUIRE(lx.size() > 1000);
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= double(lx.size());
  my /= double(lx.size());
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  CHECK(num / den < -0.2);
}

TEST_CASE("restart resets the anchor", "[splitting]") {
  AffineOracle oracle = AffineOracle::make(7, 55, false);
  Vector w0 = Vector::Ones(7);
  AccelState st = AccelState::start(w0, 2.0, 2.0);
  for (int k = 0; k < 57; ++k) st = accel_step(st, oracle).state;

  Vector anchor = st.w;
  AccelState restarted = restart(st, anchor);
  CHECK(restarted.k == 0);
  CHECK(restarted.w == anchor);
  CHECK(restarted.w_hat == anchor);

  // restarting at the current w is idempotent on (w, w_hat)
  AccelState twice = restart(restarted, restarted.w);
  CHECK(twice.w == restarted.w);
  CHECK(twice.w_hat == restarted.w_hat);

  // the restarted run equals a fresh run from the anchor
  AccelState fresh = AccelState::start(anchor, 2.0, 2.0);
  for (int k = 0; k < 23; ++k) {
    auto a = accel_step(restarted, oracle);
    auto b = accel_step(fresh, oracle);
    CHECK((a.state.w - b.state.w).norm() == 0.0);
    restarted = std::move(a.state);
    fresh = std::move(b.state);
  }

  // restarting at a fixed point keeps all residuals zero
  AccelState at_fix = restart(st, oracle.fixed_point());
  for (int k = 0; k < 5; ++k) {
    auto res = accel_step(at_fix, oracle);
    CHECK(res.seminorm_residual <= 1e-10);
    at_fix = std::move(res.state);
  }
}

TEST_CASE("state validation", "[splitting]") {
  CHECK_THROWS_AS(AccelState::start(Vector::Zero(3), 1.5, 1.0), ConfigError);
  CHECK_THROWS_AS(AccelState::start(Vector::Zero(3), 2.0, 0.0), ConfigError);
  CHECK_THROWS_AS(AccelState::start(Vector::Zero(3), 2.0, 2.5), ConfigError);
  AccelState st = AccelState::start(Vector::Zero(3), 2.0, 2.0);
  CHECK(st.k == 0);
  CHECK(st.w == st.w_hat);
}
