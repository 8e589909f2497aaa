#include "doctest.h"

#include <cmath>
#include <numbers>

#include "fnls/cutoff.hpp"
#include "fnls/evolution.hpp"
#include "fnls/ground_state.hpp"
#include "fnls/spectral_ops.hpp"
#include "fnls/virial.hpp"

using namespace fnls;

namespace {
const CutoffProfile& profile() {
  static CutoffProfile p;
  return p;
}
} // namespace

TEST_CASE("resolvent multiplier arithmetic") {
  const double cs_half = std::sqrt(std::sin(std::numbers::pi * 0.5) / std::numbers::pi);
  CHECK(cs_half == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-12));
  CHECK(cs_half == doctest::Approx(0.564190).epsilon(1e-6));

  auto g = make_grid(3, 16, 2.0 * std::numbers::pi);
  Field c = sample(g, [](const std::vector<double>&) { return 2.0; });
  Field rc = resolvent(c, 1.0, 0.5);
  CHECK((rc.v - cs_half * 2.0).abs().maxCoeff() < 1e-12);

  Field pw = sample(g, [](const std::vector<double>& x) {
    return std::polar(1.0, x[0] + x[1] + x[2]);  // |k|^2 = 3
  });
  Field rp = resolvent(pw, 1.0, 0.5);
  Field expect = pw;
  expect.v *= cs_half / 4.0;
  CHECK((rp.v - expect.v).abs().maxCoeff() < 1e-12);

  CHECK_THROWS(resolvent(c, -1.0, 0.5));
}

TEST_CASE("balakrishnan identity") {
  const double s = 0.7;
  ResolventQuadrature quad(s, 64, 4.0);

  auto g = make_grid(1, 64, 2.0 * std::numbers::pi);
  Field z(g);
  BalakrishnanCheck bz = balakrishnan_check(z, quad);
  CHECK(bz.lhs == 0.0);
  CHECK(bz.rhs == 0.0);

  const double A = 1.4;
  Field pw = sample(g, [&](const std::vector<double>& x) {
    return std::polar(A, x[0]);  // |k| = 1
  });
  BalakrishnanCheck bp = balakrishnan_check(pw, quad);
  const double expect = s * A * A * g->volume();
  CHECK(bp.lhs == doctest::Approx(expect).epsilon(1e-8));
  CHECK(bp.rhs == doctest::Approx(expect).epsilon(1e-12));

  auto g3 = make_grid(3, 16, 12.0);
  for (std::uint64_t seed : {1u, 2u, 7u}) {
    Field u = random_cylindrical(g3, seed);
    BalakrishnanCheck b = balakrishnan_check(u, quad);
    CHECK(b.rel_error < 1e-6);
  }
}

TEST_CASE("virial of real data vanishes") {
  auto g = make_grid(2, 48, 20.0);
  CylWeight w(profile(), 2, 4.0);
  auto tphi = build_weight_tables(w, *g, WeightKind::Phi);
  auto tpsi = build_weight_tables(w, *g, WeightKind::Psi);
  Field u = sample(g, [](const std::vector<double>& x) {
    return std::exp(-x[0] * x[0] - x[1] * x[1]);
  });
  CHECK(std::abs(virial_phi(u, tphi)) < 1e-12);
  CHECK(std::abs(virial_psi(u, tpsi)) < 1e-12);
}

TEST_CASE("virial of a single x_N phase") {
  auto g = make_grid(2, 64, 24.0);
  const double R = 4.0;
  CylWeight w(profile(), 2, R);
  auto tphi = build_weight_tables(w, *g, WeightKind::Phi);
  auto tpsi = build_weight_tables(w, *g, WeightKind::Psi);

  // u = g(y, x_N) e^{i x_N}: only the x_N^2/2 part of phi_R sees the phase
  Field gsq(g);
  Field u = sample(g, [](const std::vector<double>& x) {
    const double gv = std::exp(-x[0] * x[0] - (x[1] - 1.0) * (x[1] - 1.0));
    return std::polar(gv, x[1]);
  });
  double expect = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double y = g->coord(0, g->axis_index(i, 0));
    const double xN = g->coord(1, g->axis_index(i, 1));
    const double gv = std::exp(-y * y - (xN - 1.0) * (xN - 1.0));
    expect += 2.0 * xN * gv * gv * g->cell_volume();
  }
  CHECK(virial_phi(u, tphi) == doctest::Approx(expect).epsilon(1e-10));
  // the psi variant carries no x_N gradient: zero for this phase
  CHECK(std::abs(virial_psi(u, tpsi)) < 1e-12);
}

TEST_CASE("virial of an outgoing quadratic y phase is positive") {
  auto g = make_grid(2, 64, 24.0);
  CylWeight w(profile(), 2, 6.0);
  auto tpsi = build_weight_tables(w, *g, WeightKind::Psi);
  Field u = sample(g, [](const std::vector<double>& x) {
    const double gv = std::exp(-x[0] * x[0] - x[1] * x[1]);
    return std::polar(gv, x[0] * x[0] / 4.0);
  });
  // direct quadrature of 2 int psi_R'(|y|) (|y|/2) g^2
  double expect = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double y = g->coord(0, g->axis_index(i, 0));
    const double xN = g->coord(1, g->axis_index(i, 1));
    const double gv = std::exp(-y * y - xN * xN);
    expect += 2.0 * w.psiR(std::abs(y), 1) * (std::abs(y) / 2.0) *
              std::copysign(1.0, 1.0) * gv * gv * g->cell_volume();
  }
  const double got = virial_psi(u, tpsi);
  CHECK(got > 0.0);
  CHECK(got == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("virial rhs: split identity and sign structure") {
  ModelParams p(3, 0.7, 0.6);
  ResolventQuadrature quad(p.s, 64, 4.0);
  auto g = make_grid(3, 16, 12.0);
  CylWeight w(profile(), 3, 2.0);
  auto tphi = build_weight_tables(w, *g, WeightKind::Phi);
  auto tpsi = build_weight_tables(w, *g, WeightKind::Psi);

  // pointwise sign structure of the tables
  for (Eigen::Index i = 0; i < tphi.t1.size(); ++i) {
    CHECK(tphi.t1[i] >= -1e-12);
    CHECK(tphi.t2[i] >= -1e-12);
  }

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Field u = random_cylindrical(g, seed);
    for (auto kind : {WeightKind::Phi, WeightKind::Psi}) {
      const auto& tables = (kind == WeightKind::Phi) ? tphi : tpsi;
      VirialReport rep = virial_rhs(u, tables, quad, p, kind, 2.0);
      // (b1): the two nonlinear evaluations are algebraically equal
      CHECK(rep.nonlinear_split ==
            doctest::Approx(rep.nonlinear).epsilon(1e-10));
      // kinetic term bounded by 4s ||(-D)^{s/2} u||^2
      CHECK(rep.kinetic <= rep.kinetic_bound + 1e-6 * rep.kinetic_bound);
      CHECK(rep.cross_term >= -1e-12);
    }
  }
}

TEST_CASE("stationary orbit: dM/dt and rhs both vanish, identity holds") {
  ModelParams p(2, 0.7, 0.5);
  auto g = make_grid(2, 128, 40.0);
  GroundStateResult gs = petviashvili(p, g);

  const double R = 5.0;
  CylWeight w(profile(), 2, R);
  auto tphi = build_weight_tables(w, *g, WeightKind::Phi);
  ResolventQuadrature quad(p.s, 64, 4.0);

  // e^{it} Q snapshots at uniform sampling
  const double dts = 2e-3;
  std::vector<std::pair<double, Field>> snaps;
  SimulationState st = init_state(gs.Q, p);
  snaps.emplace_back(0.0, st.u);
  for (int i = 1; i <= 4; ++i) {
    for (int k = 0; k < 8; ++k) strang_step(st, p, dts / 8.0);
    snaps.emplace_back(i * dts, st.u);
  }

  auto residuals = virial_residual(snaps, tphi, quad, p, WeightKind::Phi, R);
  REQUIRE(residuals.size() == 3);
  for (const auto& rs : residuals) {
    CHECK(std::abs(rs.dMdt_fd) < 1e-3 * rs.scale);
    CHECK(std::abs(rs.rhs) < 2e-3 * rs.scale);
    CHECK(std::abs(rs.residual) < 5e-3 * rs.scale);
  }

  // orbit value constant in t
  const double M0 = virial_phi(snaps.front().second, tphi);
  const double M4 = virial_phi(snaps.back().second, tphi);
  const double scale = residuals.front().scale;
  CHECK(std::abs(M4 - M0) < 1e-6 * std::max(scale, 1.0));

  CHECK_THROWS(virial_residual({snaps[0], snaps[1]}, tphi, quad, p,
                               WeightKind::Phi, R));
  auto bad = snaps;
  bad[2].first += 1e-3;
  CHECK_THROWS(virial_residual(bad, tphi, quad, p, WeightKind::Phi, R));
}

TEST_CASE("refined mass-critical terms") {
  ModelParams p(2, 0.7, 0.7);  // sigma = 2s/N
  REQUIRE(p.mass_critical());
  auto g = make_grid(2, 64, 32.0);
  const double R = 8.0;
  CylWeight w(profile(), 2, R);
  auto t = build_weight_tables(w, *g, WeightKind::Phi);
  ResolventQuadrature quad(p.s, 64, 4.0);

  Field u = sample(g, [](const std::vector<double>& x) {
    return 1.3 * std::exp(-(x[0] * x[0] + x[1] * x[1]));
  });
  const double E0 = energy(u, p);
  RefinedTerms rt = refined_terms(u, t, w, quad, p, 0.1, E0);

  CHECK(rt.tail_term < 1e-100);   // core-supported data: t2 tail vanishes
  CHECK(rt.t1_term >= 0.0);
  CHECK(rt.leading == doctest::Approx(8.0 * p.s * E0).epsilon(1e-14));
  CHECK(rt.eta_grad > 0.0);
  // N = 2: eta^{-1/(N-1)} R^{-2s(N-2)/(N-1)} = 1/eta
  CHECK(rt.eta_tail_scale == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(rt.remainder >= 0.0);

  ModelParams bad(2, 0.7, 0.6);
  CHECK_THROWS(refined_terms(u, t, w, quad, bad, 0.1, E0));
  CHECK_THROWS(refined_terms(u, t, w, quad, p, -1.0, E0));
}
