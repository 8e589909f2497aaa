#pragma once

#include <functional>
#include <string>

#include "fnls/field.hpp"
#include "fnls/model.hpp"

namespace fnls {

/// One lhs/rhs evaluation of a functional inequality, tagged with the
/// function family it came from so ratio statistics are reproducible.
struct RatioSample {
  std::string family;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  ///< lhs/rhs, defined as 0 when lhs = 0
};

/// Radial Sobolev ratio in d = N-1 dimensions:
///   lhs = |y|^{(d-1)/2} |f(y)| at the probe radius,
///   rhs = ||(-Delta)^{s/2} f||_2^{1/(2s)} ||f||_2^{1 - 1/(2s)}.
/// f must be radial on its own grid (d >= 2); the probe is snapped to the
/// nearest grid point on the first axis.
RatioSample radial_sobolev_ratio(const Field& f, double s, double y_probe,
                                 const std::string& family = "radial");

/// Gagliardo-Nirenberg ratio on a 1D field:
///   lhs = ||f||_p, rhs = ||(-Delta)^{s/2} f||_2^alpha ||f||_2^{1-alpha},
/// alpha = (p-2)/(2 p s). Rejects p <= 2 and alpha > 1.
RatioSample gn_ratio(const Field& f, double p, double s,
                     const std::string& family = "gn");

/// Normalization constant of the 1D singular-integral representation,
///   C_{1,s} = (int_R (1 - cos xi)/|xi|^{1+s} dxi)^{-1},
/// computed by direct quadrature of the defining integral.
double c1s_constant(double s);
/// Independent closed form s/(2 Gamma(1-s) cos(pi s/2)) for cross-checks.
double c1s_closed_form(double s);

struct ProductIdentityCheck {
  double residual = 0.0;       ///< sup |A(|u|^2) - 2|u| A(|u|) + I_s(|u|,|u|)|
  double scale = 0.0;          ///< sup |A(|u|^2)|, A = (-d^2/dx^2)^{s/2}
  double c1s = 0.0;
  double selftest_error = 0.0; ///< kernel-vs-multiplier error on a pure mode
};

/// Pointwise identity
///   (-d^2)^{s/2} |u|^2 = 2|u| (-d^2)^{s/2}|u| - I_s(|u|,|u|)
/// on a 1D field, with the fractional powers evaluated spectrally and
/// I_s(|u|,|u|)(x) = C_{1,s} int (|u|(x) - |u|(x'))^2 / |x-x'|^{1+s} dx'
/// by periodized product-integration quadrature. The kernel quadrature is
/// self-tested against the spectral multiplier on a single mode first and
/// the check throws if that gate fails.
ProductIdentityCheck product_identity_check(const Field& u, double s);

/// One link of the exterior-tail estimate chain.
struct ChainRecord {
  RatioSample sup_link;  ///< sup-on-exterior bound in the y planes
  RatioSample interp_link;  ///< L^{2/(1-sigma)}-in-x_N bound
  RatioSample tail;  ///< end-to-end exterior nonlinear tail bound
  double tail_integral = 0.0;  ///< int_{|y|>=R} |u|^{2 sigma + 2} dx
};

/// Ratios for the estimate chain controlling the exterior nonlinear term:
/// the slice-sup bound, the slice-L^2 interpolation bound, and the
/// end-to-end bound tail <= R^{-sigma(N-2)} (1 + ||(-Delta)^{s/2}u||^2).
/// Requires cylindrical symmetry and 0 < sigma <= s.
ChainRecord chain_ratios(const Field& u, const ModelParams& params, double R);

/// Residual of the radial Hessian formula
///   d^2_{kl} f = (delta_kl - x_k x_l / r^2) f'(r)/r + (x_k x_l / r^2) f''(r)
/// against full spectral second partials, sup over grid points with
/// r > h (the axis cell is excluded). The radial profile and its first two
/// derivatives are supplied as callables and sampled on the grid.
double hessian_formula_check(const GridPtr& grid,
                             const std::function<double(double)>& fr,
                             const std::function<double(double)>& fr1,
                             const std::function<double(double)>& fr2);

} // namespace fnls
