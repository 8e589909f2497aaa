#include "doctest.h"

#include <cmath>
#include <numbers>

#include "fnls/evolution.hpp"
#include "fnls/ground_state.hpp"
#include "fnls/spectral_ops.hpp"

using namespace fnls;

TEST_CASE("plane wave orbit is exact up to roundoff accumulation") {
  ModelParams p(1, 0.7, 0.5);
  auto g = make_grid(1, 32, 2.0 * std::numbers::pi);
  const double A = 1.3, k = 2.0;
  Field u0 = sample(g, [&](const std::vector<double>& x) {
    return std::polar(A, k * x[0]);
  });

  SimulationState st = init_state(u0, p);
  const double dt = 1e-3;
  const int steps = 1000;
  for (int i = 0; i < steps; ++i) strang_step(st, p, dt);

  const double t = steps * dt;
  const double omega = std::pow(k * k, p.s) - std::pow(A * A, p.sigma);
  Field exact = sample(g, [&](const std::vector<double>& x) {
    return std::polar(A, k * x[0] - omega * t);
  });
  CHECK((st.u.v - exact.v).abs().maxCoeff() < 1e-6);
}

TEST_CASE("zero field stays zero") {
  ModelParams p(1, 0.7, 0.5);
  auto g = make_grid(1, 64, 10.0);
  SimulationState st = init_state(Field(g), p);
  for (int i = 0; i < 10; ++i) strang_step(st, p, 1e-2);
  CHECK(st.u.v.abs().maxCoeff() == 0.0);
}

TEST_CASE("linear flow is exact for any dt") {
  ModelParams p(1, 0.6, 0.5);
  auto g = make_grid(1, 128, 20.0);
  Field u0 = random_band_limited(g, 30, 5);

  SimulationState st = init_state(u0, p);
  strang_step(st, p, 0.7, /*nonlinear=*/false, /*do_dealias=*/false);

  Field exact = in_frequency(u0);
  const auto& ksq = g->ksq();
  for (std::size_t i = 0; i < g->size(); ++i)
    exact.v[static_cast<Eigen::Index>(i)] *=
        std::polar(1.0, -std::pow(ksq[i], p.s) * 0.7);
  to_physical(exact);
  CHECK((st.u.v - exact.v).abs().maxCoeff() < 1e-11);
}

TEST_CASE("mass conservation over a thousand nonlinear steps") {
  ModelParams p(1, 0.7, 0.6);
  auto g = make_grid(1, 256, 40.0);
  Field u0 = sample(g, [](const std::vector<double>& x) {
    return 1.2 * std::exp(-x[0] * x[0]);
  });
  SimulationState st = init_state(u0, p);
  for (int i = 0; i < 1000; ++i) strang_step(st, p, 1e-3);
  CHECK(std::abs(mass(st.u) - st.mass0) / st.mass0 < 1e-10);
}

TEST_CASE("energy drift is second order in dt") {
  ModelParams p(1, 0.8, 1.0);
  auto g = make_grid(1, 256, 40.0);
  Field u0 = sample(g, [](const std::vector<double>& x) {
    return 0.8 * std::exp(-x[0] * x[0] / 2.0);
  });

  auto max_drift = [&](double dt) {
    SimulationState st = init_state(u0, p);
    double worst = 0.0;
    const int steps = static_cast<int>(std::lround(0.5 / dt));
    for (int i = 0; i < steps; ++i) {
      strang_step(st, p, dt);
      worst = std::max(worst, std::abs(energy(st.u, p) - st.energy0));
    }
    return worst;
  };

  const double coarse = max_drift(2e-3);
  const double fine = max_drift(1e-3);
  CHECK(coarse / fine > 3.4);
  CHECK(coarse / fine < 4.6);
}

TEST_CASE("cylindrical symmetry is preserved") {
  ModelParams p(3, 0.7, 0.6);
  auto g = make_grid(3, 16, 12.0);
  Field u0 = random_cylindrical(g, 3);
  REQUIRE(cyl_symmetry_deviation(u0) < 1e-13);

  SimulationState st = init_state(u0, p);
  for (int i = 0; i < 50; ++i) strang_step(st, p, 1e-3);
  CHECK(cyl_symmetry_deviation(st.u) <
        1e-11 * std::max(1.0, st.u.v.abs().maxCoeff()));
}

TEST_CASE("time reversibility in the smooth regime") {
  ModelParams p(1, 0.7, 0.6);
  auto g = make_grid(1, 256, 40.0);
  Field u0 = sample(g, [](const std::vector<double>& x) {
    return std::exp(-x[0] * x[0]);
  });
  SimulationState st = init_state(u0, p);
  strang_step(st, p, 1e-2, true, /*do_dealias=*/false);
  strang_step(st, p, -1e-2, true, /*do_dealias=*/false);
  Field d = st.u;
  d.v -= u0.v;
  CHECK(std::sqrt(mass(d) / mass(u0)) < 1e-11);
}

TEST_CASE("dispersive regime: no detection over a long window") {
  ModelParams p(1, 0.7, 1.0);
  auto g = make_grid(1, 512, 160.0);
  Field u0 = sample(g, [](const std::vector<double>& x) {
    return 0.2 * std::exp(-x[0] * x[0]);
  });

  EvolveController ctl;
  ctl.dt0 = 1e-2;
  ctl.t_end = 5.0;
  ctl.sample_interval = 0.25;
  ctl.boundary_threshold = 1e-3;
  EvolveResult r = evolve(init_state(u0, p), p, ctl);
  CHECK(!r.verdict.detected);
  CHECK(r.status == RunStatus::Completed);
  CHECK(r.series.size() == 21);
  CHECK(r.series.back().t == doctest::Approx(5.0));
}

TEST_CASE("stationary orbit: e^{it} Q keeps its invariants") {
  ModelParams p(1, 0.7, 0.5);
  auto g = make_grid(1, 512, 60.0);
  GroundStateResult gs = petviashvili(p, g);

  EvolveController ctl;
  ctl.dt0 = 1e-3;
  ctl.t_end = 1.0;
  ctl.sample_interval = 0.05;
  ctl.adaptive = false;
  // fractional ground states have algebraic tails; the default boundary
  // budget is sized for Gaussian data
  ctl.boundary_threshold = 1e-4;
  EvolveResult r = evolve(init_state(gs.Q, p), p, ctl);
  CHECK(r.status == RunStatus::Completed);
  CHECK(!r.verdict.detected);
  for (const auto& s : r.series) {
    CHECK(std::abs(s.massv - r.state.mass0) / r.state.mass0 < 1e-10);
    CHECK(std::abs(s.grad_s - r.state.grad0) / r.state.grad0 < 1e-4);
  }
}

TEST_CASE("evolve lands exactly on sample times and rejects bad steps") {
  ModelParams p(1, 0.7, 0.5);
  auto g = make_grid(1, 64, 20.0);
  SimulationState st = init_state(Field(g), p);
  CHECK_THROWS(strang_step(st, p, 0.0));
}
