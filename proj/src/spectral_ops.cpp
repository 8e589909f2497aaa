#include "fnls/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace fnls {

namespace {

void require_finite(const Field& f, const char* op) {
  if (!f.finite())
    throw std::invalid_argument(std::string(op) + ": non-finite values in input field");
}

/// Plancherel weight: sum_k |fhat_k|^2 * w equals the physical Riemann sum.
double plancherel_weight(const Grid& g) {
  return g.cell_volume() / static_cast<double>(g.size());
}

} // namespace

Field fractional_power(const Field& f, double p) {
  require_finite(f, "fractional_power");
  if (!(p > 0.0)) throw std::invalid_argument("fractional_power: p must be positive");
  const Space in_space = f.space;
  Field out = in_frequency(f);
  const auto& ksq = f.grid->ksq();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double k2 = ksq[i];
    out.v[static_cast<Eigen::Index>(i)] *= (k2 == 0.0) ? 0.0 : std::pow(k2, p);
  }
  if (in_space == Space::Physical) to_physical(out);
  return out;
}

Field partial_fractional(const Field& f, double p, const std::vector<int>& axes) {
  require_finite(f, "partial_fractional");
  if (!(p > 0.0)) throw std::invalid_argument("partial_fractional: p must be positive");
  const Space in_space = f.space;
  Field out = in_frequency(f);
  const Grid& g = *f.grid;
  for (std::size_t i = 0; i < out.size(); ++i) {
    double k2 = 0.0;
    for (int a : axes) {
      const double k = g.wavenumbers(a)[g.axis_index(i, a)];
      k2 += k * k;
    }
    out.v[static_cast<Eigen::Index>(i)] *= (k2 == 0.0) ? 0.0 : std::pow(k2, p);
  }
  if (in_space == Space::Physical) to_physical(out);
  return out;
}

Field partial_fractional_xN(const Field& f, double p) {
  return partial_fractional(f, p, {f.grid->dim() - 1});
}

std::vector<Field> gradient_axes(const Field& f, const std::vector<int>& axes) {
  require_finite(f, "gradient");
  const Field fh = in_frequency(f);
  const Grid& g = *f.grid;
  std::vector<Field> out;
  out.reserve(axes.size());
  for (int a : axes) {
    Field comp = fh;
    const auto& k = g.wavenumbers_odd(a);
    for (std::size_t i = 0; i < comp.size(); ++i)
      comp.v[static_cast<Eigen::Index>(i)] *= std::complex<double>(0.0, k[g.axis_index(i, a)]);
    to_physical(comp);
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<Field> gradient(const Field& f) {
  std::vector<int> axes(f.grid->dim());
  std::iota(axes.begin(), axes.end(), 0);
  return gradient_axes(f, axes);
}

double mass(const Field& f) {
  if (f.space == Space::Physical)
    return f.v.abs2().sum() * f.grid->cell_volume();
  return f.v.abs2().sum() * plancherel_weight(*f.grid);
}

double lp_norm_pow(const Field& f, double p) {
  const Field fp = in_physical(f);
  return fp.v.abs().pow(p).sum() * f.grid->cell_volume();
}

double sobolev_seminorm(const Field& f, double s) {
  const Field fh = in_frequency(f);
  const auto& ksq = f.grid->ksq();
  double acc = 0.0;
  for (std::size_t i = 0; i < fh.size(); ++i) {
    if (ksq[i] == 0.0) continue;
    acc += std::pow(ksq[i], s) * std::norm(fh.v[static_cast<Eigen::Index>(i)]);
  }
  return std::sqrt(acc * plancherel_weight(*f.grid));
}

double energy(const Field& f, const ModelParams& params) {
  params.validate();
  const double grad = sobolev_seminorm(f, params.s);
  const double p = 2.0 * params.sigma + 2.0;
  return 0.5 * grad * grad - lp_norm_pow(f, p) / p;
}

double inner_real(const Field& a, const Field& b) {
  const Field ap = in_physical(a);
  const Field bp = in_physical(b);
  return ((ap.v.conjugate() * bp.v).real()).sum() * a.grid->cell_volume();
}

double boundary_mass(const Field& f, double shell_fraction) {
  const Field fp = in_physical(f);
  const Grid& g = *f.grid;
  double acc = 0.0;
  for (std::size_t i = 0; i < fp.size(); ++i) {
    bool shell = false;
    for (int a = 0; a < g.dim(); ++a) {
      const double x = g.coord(a, g.axis_index(i, a));
      if (std::abs(x) > (1.0 - shell_fraction) * 0.5 * g.length(a)) { shell = true; break; }
    }
    if (shell) acc += std::norm(fp.v[static_cast<Eigen::Index>(i)]);
  }
  return acc * g.cell_volume();
}

void dealias(Field& f) {
  const Space in_space = f.space;
  to_frequency(f);
  const auto& mask = f.grid->dealias_mask();
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!mask[i]) f.v[static_cast<Eigen::Index>(i)] = 0.0;
  if (in_space == Space::Physical) to_physical(f);
}

double cyl_symmetry_deviation(const Field& f) {
  const Field fp = in_physical(f);
  const Grid& g = *f.grid;
  const int d = g.dim();
  const int ny = d - 1;
  if (ny < 1) return 0.0;

  double dev = 0.0;
  std::vector<int> idx(d), jdx(d);

  // Sign flip of each y axis: index i -> (n - i) mod n.
  for (int a = 0; a < ny; ++a) {
    for (std::size_t i = 0; i < fp.size(); ++i) {
      g.unflatten(i, idx.data());
      jdx = idx;
      jdx[a] = (g.n(a) - idx[a]) % g.n(a);
      dev = std::max(dev, std::abs(fp.v[static_cast<Eigen::Index>(i)] -
                                   fp.v[static_cast<Eigen::Index>(g.flatten(jdx.data()))]));
    }
  }
  // Adjacent transpositions of y axes (require equal shapes).
  for (int a = 0; a + 1 < ny; ++a) {
    if (g.n(a) != g.n(a + 1) || g.length(a) != g.length(a + 1)) continue;
    for (std::size_t i = 0; i < fp.size(); ++i) {
      g.unflatten(i, idx.data());
      jdx = idx;
      std::swap(jdx[a], jdx[a + 1]);
      dev = std::max(dev, std::abs(fp.v[static_cast<Eigen::Index>(i)] -
                                   fp.v[static_cast<Eigen::Index>(g.flatten(jdx.data()))]));
    }
  }
  return dev;
}

Field random_band_limited(const GridPtr& grid, int band, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Field f(grid, Space::Frequency);
  const Grid& g = *grid;
  for (std::size_t i = 0; i < f.size(); ++i) {
    bool keep = true;
    for (int a = 0; a < g.dim(); ++a) {
      const int m = g.axis_index(i, a);
      const int ms = (m < g.n(a) / 2) ? m : m - g.n(a);
      if (std::abs(ms) > band) { keep = false; break; }
    }
    if (keep) {
      // Draw in flat-index order so the field is seed-reproducible.
      const double re = gauss(rng);
      const double im = gauss(rng);
      f.v[static_cast<Eigen::Index>(i)] = std::complex<double>(re, im);
    }
  }
  to_physical(f);
  const double m0 = mass(f);
  if (m0 > 0.0) f.v *= 1.0 / std::sqrt(m0);
  return f;
}

Field random_cylindrical(const GridPtr& grid, std::uint64_t seed, int bumps) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Grid& g = *grid;
  const int d = g.dim();
  const double Ly = g.length(0);
  const double Lz = g.length(d - 1);

  struct Bump {
    double rho, z, wy, wz;
    std::complex<double> amp;
  };
  std::vector<Bump> spec(bumps);
  for (auto& b : spec) {
    b.rho = 0.30 * Ly * unif(rng);
    b.z = 0.25 * Lz * (2.0 * unif(rng) - 1.0);
    b.wy = 0.06 * Ly * (1.0 + unif(rng));
    b.wz = 0.06 * Lz * (1.0 + unif(rng));
    const double phase = 2.0 * std::numbers::pi * unif(rng);
    b.amp = std::polar(0.5 + unif(rng), phase);
  }

  Field f = sample(grid, [&](const std::vector<double>& x) {
    double r2 = 0.0;
    for (int a = 0; a < d - 1; ++a) r2 += x[a] * x[a];
    const double r = std::sqrt(r2);
    const double z = x[d - 1];
    std::complex<double> v = 0.0;
    for (const auto& b : spec) {
      const double dy = (r - b.rho) / b.wy;
      const double dz = (z - b.z) / b.wz;
      v += b.amp * std::exp(-dy * dy - dz * dz);
    }
    return v;
  });
  // Low-pass so the field is genuinely band-limited.
  to_frequency(f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    bool keep = true;
    for (int a = 0; a < d; ++a) {
      const int m = g.axis_index(i, a);
      const int ms = (m < g.n(a) / 2) ? m : m - g.n(a);
      if (std::abs(ms) > g.n(a) / 4) { keep = false; break; }
    }
    if (!keep) f.v[static_cast<Eigen::Index>(i)] = 0.0;
  }
  to_physical(f);
  const double m0 = mass(f);
  if (m0 > 0.0) f.v *= 1.0 / std::sqrt(m0);
  return f;
}

} // namespace fnls
