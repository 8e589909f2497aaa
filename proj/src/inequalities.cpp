#include "fnls/inequalities.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "fnls/quadrature_util.hpp"
#include "fnls/spectral_ops.hpp"

namespace fnls {

namespace {

double gl16_panel(const std::function<double(double)>& f, double a, double b) {
  static const QuadRule rule = gauss_legendre(16);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * acc;
}

} // namespace

double c1s_closed_form(double s) {
  return s / (2.0 * std::tgamma(1.0 - s) * std::cos(0.5 * std::numbers::pi * s));
}

double c1s_constant(double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("c1s_constant: s in (0,1)");
  auto integrand = [s](double xi) {
    return (1.0 - std::cos(xi)) * std::pow(xi, -1.0 - s);
  };
  // Taylor series of 1 - cos below eps, panels up to Xi, then the
  // integration-by-parts tail of the oscillatory part.
  const double eps = 0.25;
  double acc = std::pow(eps, 2.0 - s) / (2.0 * (2.0 - s)) -
               std::pow(eps, 4.0 - s) / (24.0 * (4.0 - s)) +
               std::pow(eps, 6.0 - s) / (720.0 * (6.0 - s)) -
               std::pow(eps, 8.0 - s) / (40320.0 * (8.0 - s));
  const double pi = std::numbers::pi;
  for (int p = 0; p < 8; ++p)
    acc += gl16_panel(integrand, eps + (pi - eps) * p / 8.0,
                      eps + (pi - eps) * (p + 1) / 8.0);
  const int far_panels = 3200;
  const double Xi = pi * (1 + far_panels);
  for (int p = 1; p <= far_panels; ++p)
    acc += gl16_panel(integrand, pi * p, pi * (p + 1));
  acc += std::pow(Xi, -s) / s + std::sin(Xi) * std::pow(Xi, -1.0 - s) -
         (1.0 + s) * std::cos(Xi) * std::pow(Xi, -2.0 - s);
  return 1.0 / (2.0 * acc);
}

RatioSample radial_sobolev_ratio(const Field& f, double s, double y_probe,
                                 const std::string& family) {
  const auto& g = *f.grid;
  if (g.dim() < 2) throw std::invalid_argument("radial_sobolev_ratio: need >= 2 dims");
  if (!(y_probe > 0.0)) throw std::invalid_argument("radial_sobolev_ratio: probe > 0");
  const int d = g.dim();

  // snap the probe to the nearest grid point on the positive first axis
  int i0 = static_cast<int>(std::lround((y_probe + 0.5 * g.length(0)) / g.spacing(0)));
  i0 = std::min(std::max(i0, g.n(0) / 2 + 1), g.n(0) - 1);
  std::vector<int> idx(d, 0);
  for (int a = 0; a < d; ++a) idx[a] = g.n(a) / 2;  // coordinate 0
  idx[0] = i0;
  const double r = g.coord(0, i0);
  const double fval = std::abs(f.v[static_cast<Eigen::Index>(g.flatten(idx.data()))]);

  RatioSample out;
  out.family = family;
  out.lhs = std::pow(r, 0.5 * (d - 1)) * fval;
  const double grad = sobolev_seminorm(f, s);
  const double l2 = std::sqrt(mass(f));
  out.rhs = std::pow(grad, 1.0 / (2.0 * s)) * std::pow(l2, 1.0 - 1.0 / (2.0 * s));
  out.ratio = (out.lhs == 0.0) ? 0.0 : out.lhs / out.rhs;
  return out;
}

RatioSample gn_ratio(const Field& f, double p, double s, const std::string& family) {
  if (f.grid->dim() != 1) throw std::invalid_argument("gn_ratio: 1D fields only");
  if (!(p > 2.0)) throw std::invalid_argument("gn_ratio: p > 2 required");
  const double alpha = (p - 2.0) / (2.0 * p * s);
  if (alpha > 1.0)
    throw std::invalid_argument("gn_ratio: alpha = (p-2)/(2ps) > 1, p inadmissible for this s");
  RatioSample out;
  out.family = family;
  out.lhs = std::pow(lp_norm_pow(f, p), 1.0 / p);
  out.rhs = std::pow(sobolev_seminorm(f, s), alpha) *
            std::pow(std::sqrt(mass(f)), 1.0 - alpha);
  out.ratio = (out.lhs == 0.0) ? 0.0 : out.lhs / out.rhs;
  return out;
}

namespace {

/// Periodized product-integration quadrature for the 1D kernel
/// |d|^{-1-s}. For the primary period the smooth factor
/// q(d) = ((f(x+d)-f(x))/d)^2 is integrated against |d|^{1-s} cell by
/// cell (q(0) = f'(x)^2 handles the singular cell); image contributions
/// use the plain difference squared against cell integrals of the kernel.
struct KernelQuad {
  Eigen::ArrayXd Wc;     ///< combined per-offset weight (without C_{1,s})
  double w0 = 0.0;       ///< singular-cell weight, multiplies f'(x)^2
  double c1s = 0.0;
  int n = 0;

  KernelQuad(const Grid& g, double s) {
    n = g.n(0);
    const double h = g.spacing(0);
    const double L = g.length(0);
    const int images = 32;
    Wc = Eigen::ArrayXd::Zero(n);
    auto cell_k = [&](double dist) {  // int over the cell of |d|^{-1-s}
      const double a = dist - 0.5 * h, b = dist + 0.5 * h;
      return (std::pow(a, -s) - std::pow(b, -s)) / s;
    };
    auto cell_q = [&](double dist) {  // int over the cell of |d|^{1-s}
      const double a = std::max(dist - 0.5 * h, 0.0), b = dist + 0.5 * h;
      return (std::pow(b, 2.0 - s) - std::pow(a, 2.0 - s)) / (2.0 - s);
    };
    w0 = 2.0 * std::pow(0.5 * h, 2.0 - s) / (2.0 - s);
    for (int j = -n / 2 + 1; j <= n / 2; ++j) {
      if (j == 0) continue;
      const int delta = (j + n) % n;
      const double d = j * h;
      Wc[delta] += cell_q(std::abs(d)) / (d * d);
      for (int m = 1; m <= images; ++m) {
        Wc[delta] += cell_k(std::abs(d + m * L));
        Wc[delta] += cell_k(std::abs(d - m * L));
      }
      // midpoint Euler-Maclaurin tail for the images beyond the cutoff
      const double D = (images + 0.5) * L;
      Wc[delta] += h / (s * L) * (std::pow(D + d, -s) + std::pow(D - d, -s));
    }
    c1s = c1s_constant(s);
  }

  /// I_s(f,f) at every grid point; fp is the spectral derivative of f.
  Eigen::ArrayXd apply(const Eigen::ArrayXd& f, const Eigen::ArrayXd& fp) const {
    Eigen::ArrayXd I = w0 * fp.square();
    Eigen::ArrayXd shifted(n);
    for (int delta = 1; delta < n; ++delta) {
      shifted.head(n - delta) = f.tail(n - delta);
      shifted.tail(delta) = f.head(delta);
      I += Wc[delta] * (shifted - f).square();
    }
    return c1s * I;
  }
};

Eigen::ArrayXd real_part(const Field& f) { return f.v.real(); }

Field from_real(const GridPtr& g, const Eigen::ArrayXd& a) {
  Field f(g);
  f.v = a.cast<std::complex<double>>();
  return f;
}

} // namespace

ProductIdentityCheck product_identity_check(const Field& u, double s) {
  const GridPtr g = u.grid;
  if (g->dim() != 1) throw std::invalid_argument("product_identity_check: 1D fields only");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("product_identity_check: s in (0,1)");
  const Field up = in_physical(u);

  KernelQuad quad(*g, s);
  ProductIdentityCheck out;
  out.c1s = quad.c1s;

  auto residual_of = [&](const Eigen::ArrayXd& f) {
    const Field ff = from_real(g, f);
    const Eigen::ArrayXd Af = real_part(in_physical(fractional_power(ff, 0.5 * s)));
    const Eigen::ArrayXd Af2 =
        real_part(in_physical(fractional_power(from_real(g, f.square()), 0.5 * s)));
    const Eigen::ArrayXd fp = real_part(gradient(ff)[0]);
    const Eigen::ArrayXd I = quad.apply(f, fp);
    struct { double res, scale; } r{(Af2 - 2.0 * f * Af + I).abs().maxCoeff(),
                                    Af2.abs().maxCoeff()};
    return r;
  };

  // gate: the identity on a pure mode, where every term is spectral-exact
  const double k1 = 4.0 * 2.0 * std::numbers::pi / g->length(0);
  Eigen::ArrayXd mode(g->n(0));
  for (int i = 0; i < g->n(0); ++i) mode[i] = std::cos(k1 * g->coord(0, i));
  const auto st = residual_of(mode);
  out.selftest_error = st.res / st.scale;
  if (out.selftest_error > 1e-5)
    throw std::runtime_error(
        "product_identity_check: kernel quadrature self-test failed (relative error " +
        std::to_string(out.selftest_error) + ")");

  const Eigen::ArrayXd f = up.v.abs();
  const auto r = residual_of(f);
  out.residual = r.res;
  out.scale = r.scale;
  return out;
}

ChainRecord chain_ratios(const Field& u, const ModelParams& params, double R) {
  const GridPtr g = u.grid;
  const int N = g->dim();
  if (N != params.dim)
    throw std::invalid_argument("chain_ratios: grid/params dimension mismatch");
  if (N < 3) throw std::invalid_argument("chain_ratios: need N >= 3");
  const double sigma = params.sigma, s = params.s;
  if (!(sigma > 0.0 && sigma <= s))
    throw std::invalid_argument("chain_ratios: requires 0 < sigma <= s");
  const Field up = in_physical(u);
  if (cyl_symmetry_deviation(up) > 1e-8 * std::max(1.0, up.v.abs().maxCoeff()))
    throw std::invalid_argument("chain_ratios: field is not cylindrically symmetric");

  const int nN = g->n(N - 1);
  const double hN = g->spacing(N - 1);
  double cell_y = 1.0;
  for (int a = 0; a < N - 1; ++a) cell_y *= g->spacing(a);

  std::vector<double> slice_supsq(nN, 0.0), slice_l2y(nN, 0.0);
  double tail_integral = 0.0;
  std::vector<int> idx(N);
  for (std::size_t i = 0; i < g->size(); ++i) {
    g->unflatten(i, idx.data());
    double r2 = 0.0;
    for (int a = 0; a < N - 1; ++a) {
      const double x = g->coord(a, idx[a]);
      r2 += x * x;
    }
    const double asq = std::norm(up.v[static_cast<Eigen::Index>(i)]);
    const int iN = idx[N - 1];
    slice_l2y[iN] += asq * cell_y;
    if (r2 >= R * R) {
      slice_supsq[iN] = std::max(slice_supsq[iN], asq);
      tail_integral += std::pow(asq, sigma + 1.0) * g->cell_volume();
    }
  }

  std::vector<int> y_axes(N - 1);
  for (int a = 0; a < N - 1; ++a) y_axes[a] = a;
  const double Ky = mass(partial_fractional(up, 0.5 * s, y_axes));
  const double M = mass(up);

  ChainRecord rec;
  rec.tail_integral = tail_integral;

  rec.sup_link.family = "sup_link";
  for (int iN = 0; iN < nN; ++iN) rec.sup_link.lhs += slice_supsq[iN] * hN;
  rec.sup_link.rhs = std::pow(R, -(N - 2.0)) * std::pow(Ky, 1.0 / (2.0 * s)) *
                 std::pow(M, (2.0 * s - 1.0) / (2.0 * s));
  rec.sup_link.ratio = (rec.sup_link.lhs == 0.0) ? 0.0 : rec.sup_link.lhs / rec.sup_link.rhs;

  rec.interp_link.family = "interp_link";
  for (int iN = 0; iN < nN; ++iN)
    rec.interp_link.lhs += std::pow(slice_l2y[iN], 1.0 / (1.0 - sigma)) * hN;
  Field absu(g);
  absu.v = up.v.abs().cast<std::complex<double>>();
  const double KxN = mass(partial_fractional_xN(absu, 0.5 * s));
  rec.interp_link.rhs = std::pow(KxN, sigma / (2.0 * s * (1.0 - sigma)));
  rec.interp_link.ratio = (rec.interp_link.lhs == 0.0) ? 0.0 : rec.interp_link.lhs / rec.interp_link.rhs;

  rec.tail.family = "tail";
  rec.tail.lhs = tail_integral;
  const double grad2 = std::pow(sobolev_seminorm(up, s), 2.0);
  rec.tail.rhs = std::pow(R, -sigma * (N - 2.0)) * (1.0 + grad2);
  rec.tail.ratio = (rec.tail.lhs == 0.0) ? 0.0 : rec.tail.lhs / rec.tail.rhs;
  return rec;
}

double hessian_formula_check(const GridPtr& grid,
                             const std::function<double(double)>& fr,
                             const std::function<double(double)>& fr1,
                             const std::function<double(double)>& fr2) {
  const int d = grid->dim();
  if (d < 2) throw std::invalid_argument("hessian_formula_check: need >= 2 dims");
  Field f = sample(grid, [&](const std::vector<double>& x) {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return fr(std::sqrt(r2));
  });
  to_frequency(f);

  // spectral second partials; diagonal uses the even multiplier -k_a^2,
  // off-diagonal the product of Nyquist-zeroed odd multipliers
  auto second_partial = [&](int a, int b) {
    Field out = f;
    const auto& ka = (a == b) ? grid->wavenumbers(a) : grid->wavenumbers_odd(a);
    const auto& kb = grid->wavenumbers_odd(b);
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const double m = (a == b)
                           ? -ka[grid->axis_index(i, a)] * ka[grid->axis_index(i, a)]
                           : -ka[grid->axis_index(i, a)] * kb[grid->axis_index(i, b)];
      out.v[static_cast<Eigen::Index>(i)] *= m;
    }
    to_physical(out);
    return out;
  };

  double sup = 0.0;
  const double h = grid->spacing(0);
  std::vector<int> idx(d);
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      const Field H = second_partial(a, b);
      for (std::size_t i = 0; i < grid->size(); ++i) {
        grid->unflatten(i, idx.data());
        double r2 = 0.0;
        bool interior = true;
        std::vector<double> x(d);
        for (int c = 0; c < d; ++c) {
          x[c] = grid->coord(c, idx[c]);
          r2 += x[c] * x[c];
          if (std::abs(x[c]) > 0.35 * grid->length(c)) interior = false;
        }
        const double r = std::sqrt(r2);
        if (r <= h || !interior) continue;
        const double proj = x[a] * x[b] / r2;
        const double formula =
            ((a == b ? 1.0 : 0.0) - proj) * fr1(r) / r + proj * fr2(r);
        sup = std::max(sup,
                       std::abs(formula - H.v[static_cast<Eigen::Index>(i)].real()));
      }
    }
  }
  return sup;
}

} // namespace fnls
