#include "doctest.h"

#include <cmath>

#include "fnls/ground_state.hpp"
#include "fnls/spectral_ops.hpp"

using namespace fnls;

namespace {

double l2_rel_diff(const Field& a, const Field& b) {
  Field d = a;
  d.v -= b.v;
  return std::sqrt(mass(d) / mass(b));
}

double equation_residual(const Field& Q, const ModelParams& p) {
  Field r = fractional_power(Q, p.s);
  r.v += Q.v - Q.v.abs().pow(2.0 * p.sigma) * Q.v;
  return r.v.abs().maxCoeff();
}

} // namespace

TEST_CASE("explicit profile oracle: N=1, s=1/2, sigma=1/2") {
  ModelParams p(1, 0.5, 0.5);
  auto g = make_grid(1, 65536, 4096.0);

  // the explicit solution Q(x) = 2/(1+x^2) must satisfy the equation on
  // this grid before it is used as an oracle
  Field exact = sample(g, [](const std::vector<double>& x) {
    return 2.0 / (1.0 + x[0] * x[0]);
  });
  CHECK(equation_residual(exact, p) < 1e-6);

  PetviashviliOptions opts;
  opts.tol_residual = 2e-6;  // periodization floor of the algebraic tail
  GroundStateResult res = petviashvili(p, g, nullptr, opts);
  CHECK(res.residual < 2e-6);
  CHECK(l2_rel_diff(res.Q, exact) < 1e-3);
}

TEST_CASE("classical soliton oracle: s near 1") {
  ModelParams p(1, 0.999, 1.0);
  auto g = make_grid(1, 2048, 50.0);
  GroundStateResult res = petviashvili(p, g);
  CHECK(res.residual < 1e-8);

  Field soliton = sample(g, [](const std::vector<double>& x) {
    return std::sqrt(2.0) / std::cosh(x[0]);
  });
  CHECK(l2_rel_diff(res.Q, soliton) < 1e-2);
}

TEST_CASE("converged Q is real, positive, radially nonincreasing") {
  ModelParams p(1, 0.7, 0.5);
  auto g = make_grid(1, 512, 60.0);
  GroundStateResult res = petviashvili(p, g);
  CHECK(res.residual < 1e-8);
  CHECK(res.Q.v.imag().abs().maxCoeff() < 1e-12);

  const int n = g->n(0);
  const double center = res.Q.v[n / 2].real();
  CHECK(center > 0.0);
  for (int i = n / 2; i + 1 < n; ++i)
    CHECK(res.Q.v[i + 1].real() <= res.Q.v[i].real() + 1e-12);
}

TEST_CASE("iteration is seed independent") {
  ModelParams p(1, 0.7, 0.5);
  auto g = make_grid(1, 512, 60.0);
  GroundStateResult a = petviashvili(p, g);

  Field seed = sample(g, [](const std::vector<double>& x) {
    return 0.3 * std::exp(-x[0] * x[0] / 9.0);
  });
  GroundStateResult b = petviashvili(p, g, &seed);
  CHECK(l2_rel_diff(a.Q, b.Q) < 1e-6);
}

TEST_CASE("thresholds invariant under grid refinement") {
  // N=1 mass-supercritical: sigma > 2s needs s_c > 0
  ModelParams p(1, 0.6, 1.3);
  auto coarse = make_grid(1, 512, 60.0);
  auto fine = make_grid(1, 1024, 60.0);
  GroundStateResult rc = petviashvili(p, coarse);
  GroundStateResult rf = petviashvili(p, fine);
  ThresholdRecord tc = thresholds(rc, p);
  ThresholdRecord tf = thresholds(rf, p);
  REQUIRE(tc.rhs_grad.has_value());
  REQUIRE(tf.rhs_grad.has_value());
  CHECK(*tc.rhs_grad == doctest::Approx(*tf.rhs_grad).epsilon(1e-4));
  if (tc.rhs_EM && tf.rhs_EM)
    CHECK(*tc.rhs_EM == doctest::Approx(*tf.rhs_EM).epsilon(1e-4));
}

TEST_CASE("threshold record evaluators") {
  ModelParams p(1, 0.6, 1.3);
  auto g = make_grid(1, 512, 60.0);
  GroundStateResult res = petviashvili(p, g);
  ThresholdRecord rec = thresholds(res, p);

  // self-comparison: (c2) is an equality, hence not strictly satisfied
  const double G0 = res.grad_s_Q, M0 = res.mass_Q;
  CHECK(rec.lhs_grad(G0, M0) ==
        doctest::Approx(*rec.rhs_grad).epsilon(1e-8));
  CHECK(!rec.c2_satisfied(G0 * (1.0 - 1e-9), M0));

  // amplified data: strict monotonicity in amplitude
  const double amp = 1.2;
  CHECK(rec.c2_satisfied(amp * G0, amp * amp * M0) ==
        (rec.lhs_grad(amp * G0, amp * amp * M0) > *rec.rhs_grad));
  CHECK(rec.lhs_grad(amp * G0, M0) > *rec.rhs_grad);

  // subcritical parameters are rejected
  ModelParams sub(1, 0.5, 0.5);  // s_c = 1/2 - 1 < 0
  auto g2 = make_grid(1, 256, 100.0);
  GroundStateResult r2 = petviashvili(sub, g2);
  CHECK_THROWS(thresholds(r2, sub));
}

TEST_CASE("divergent configurations fail with a trace") {
  ModelParams p(1, 0.7, 0.5);
  auto g = make_grid(1, 64, 8.0);
  Field seed = sample(g, [](const std::vector<double>&) { return 1e-30; });
  PetviashviliOptions opts;
  opts.max_iter = 10;
  CHECK_THROWS(petviashvili(p, g, &seed, opts));
}
