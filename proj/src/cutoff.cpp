#include "fnls/cutoff.hpp"

#include <cmath>
#include <stdexcept>

#include "fnls/quadrature_util.hpp"

namespace fnls {

namespace {

/// Value and first three derivatives of a scalar function, with just enough
/// arithmetic to differentiate the bump ratio in closed form.
struct Jet {
  double f = 0, d1 = 0, d2 = 0, d3 = 0;
};

Jet operator+(const Jet& a, const Jet& b) {
  return {a.f + b.f, a.d1 + b.d1, a.d2 + b.d2, a.d3 + b.d3};
}

Jet operator*(const Jet& a, const Jet& b) {
  return {a.f * b.f,
          a.d1 * b.f + a.f * b.d1,
          a.d2 * b.f + 2.0 * a.d1 * b.d1 + a.f * b.d2,
          a.d3 * b.f + 3.0 * a.d2 * b.d1 + 3.0 * a.d1 * b.d2 + a.f * b.d3};
}

Jet reciprocal(const Jet& g) {
  const double g1 = g.f;
  const double inv = 1.0 / g1;
  const double inv2 = inv * inv;
  Jet r;
  r.f = inv;
  r.d1 = -g.d1 * inv2;
  r.d2 = (2.0 * g.d1 * g.d1 - g1 * g.d2) * inv2 * inv;
  r.d3 = (-6.0 * g.d1 * g.d1 * g.d1 + 6.0 * g1 * g.d1 * g.d2 - g1 * g1 * g.d3) *
         inv2 * inv2;
  return r;
}

/// g(u) = e^{-1/u} for u > 0, extended by zero, with derivatives.
Jet bump(double u) {
  if (u <= 1e-12) return {};
  const double g = std::exp(-1.0 / u);
  const double u2 = u * u;
  Jet j;
  j.f = g;
  j.d1 = g / u2;
  j.d2 = g * (1.0 - 2.0 * u) / (u2 * u2);
  j.d3 = g * (1.0 - 6.0 * u + 6.0 * u2) / (u2 * u2 * u2);
  return j;
}

/// Smooth descending step on [0,1]: S(0)=1, S(1)=0.
Jet smooth_step(double t) {
  if (t <= 0.0) return {1.0, 0.0, 0.0, 0.0};
  if (t >= 1.0) return {};
  const Jet a = [&] {
    Jet b = bump(1.0 - t);  // chain rule for u = 1 - t
    return Jet{b.f, -b.d1, b.d2, -b.d3};
  }();
  const Jet b = bump(t);
  return a * reciprocal(a + b);
}

constexpr int kPanels = 2048;
constexpr double kBlendLo = 1.0;
constexpr double kBlendHi = 10.0;

} // namespace

double CutoffProfile::h(double r, int order) const {
  const double t = (r - kBlendLo) / (kBlendHi - kBlendLo);
  const Jet j = smooth_step(t);
  const double c = 1.0 / (kBlendHi - kBlendLo);
  switch (order) {
    case 0: return j.f;
    case 1: return j.d1 * c;
    case 2: return j.d2 * c * c;
    case 3: return j.d3 * c * c * c;
    default: throw std::invalid_argument("CutoffProfile::h: order must be 0..3");
  }
}

CutoffProfile::CutoffProfile() : panels_(kPanels) {
  // Tabulate int_1^r rho h(rho) drho at panel edges once.
  const QuadRule gl = gauss_legendre(16);
  cum_.assign(panels_ + 1, 0.0);
  const double dr = (kBlendHi - kBlendLo) / panels_;
  double acc = 0.0;
  for (int p = 0; p < panels_; ++p) {
    const double a = kBlendLo + p * dr;
    double panel = 0.0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double rho = a + 0.5 * dr * (gl.nodes[q] + 1.0);
      panel += gl.weights[q] * rho * h(rho);
    }
    acc += 0.5 * dr * panel;
    cum_[p + 1] = acc;
  }
  psi_inf_ = 0.5 + acc;
}

double CutoffProfile::psi_integral(double r) const {
  const double dr = (kBlendHi - kBlendLo) / panels_;
  int p = static_cast<int>((r - kBlendLo) / dr);
  if (p >= panels_) p = panels_ - 1;
  const double a = kBlendLo + p * dr;
  static const QuadRule gl = gauss_legendre(16);
  double tail = 0.0;
  const double half = 0.5 * (r - a);
  for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
    const double rho = a + half * (gl.nodes[q] + 1.0);
    tail += gl.weights[q] * rho * h(rho);
  }
  return cum_[p] + half * tail;
}

double CutoffProfile::eval(double r, int order) const {
  if (r < 0.0) throw std::invalid_argument("CutoffProfile::eval: negative radius");
  if (order < 0 || order > 4)
    throw std::invalid_argument("CutoffProfile::eval: order must be 0..4");

  if (r <= kBlendLo) {
    switch (order) {
      case 0: return 0.5 * r * r;
      case 1: return r;
      case 2: return 1.0;
      default: return 0.0;
    }
  }
  if (r >= kBlendHi) return (order == 0) ? psi_inf_ : 0.0;

  // psi' = r h, differentiated by Leibniz.
  switch (order) {
    case 0: return 0.5 + psi_integral(r);
    case 1: return r * h(r);
    case 2: return h(r) + r * h(r, 1);
    case 3: return 2.0 * h(r, 1) + r * h(r, 2);
    case 4: return 3.0 * h(r, 2) + r * h(r, 3);
  }
  return 0.0;
}

double CutoffProfile::dpsi_over_r(double r) const {
  if (r < 1e-300) return 1.0;  // analytic limit psi''(0)
  if (r <= kBlendLo) return 1.0;
  if (r >= kBlendHi) return 0.0;
  return h(r);
}

CylWeight::CylWeight(const CutoffProfile& profile, int dim, double R)
    : profile_(&profile), dim_(dim), R_(R) {
  if (dim_ < 2) throw std::invalid_argument("CylWeight: dimension must be >= 2");
  if (!(R_ > 0.0)) throw std::invalid_argument("CylWeight: R must be positive");
}

double CylWeight::psiR(double r, int order) const {
  return std::pow(R_, 2 - order) * profile_->eval(r / R_, order);
}

double CylWeight::psiR_prime_over_r(double r) const {
  return profile_->dpsi_over_r(r / R_);
}

double CylWeight::lap_psiR(double r) const {
  const double u = r / R_;
  return profile_->eval(u, 2) + (dim_ - 2) * profile_->dpsi_over_r(u);
}

double CylWeight::bilap_psiR(double r) const {
  const double u = r / R_;
  if (u <= 1.0) return 0.0;  // quadratic core
  const int d = dim_ - 1;
  const double p1 = profile_->eval(u, 1);
  const double p2 = profile_->eval(u, 2);
  const double p3 = profile_->eval(u, 3);
  const double p4 = profile_->eval(u, 4);
  return (p4 + 2.0 * (d - 1) * p3 / u +
          (d - 1) * (d - 3) * (p2 / (u * u) - p1 / (u * u * u))) /
         (R_ * R_);
}

double CylWeight::phi(const std::vector<double>& x) const {
  double r2 = 0.0;
  for (int a = 0; a < dim_ - 1; ++a) r2 += x[a] * x[a];
  const double xn = x[dim_ - 1];
  return psiR(std::sqrt(r2), 0) + 0.5 * xn * xn;
}

double CylWeight::hessian_phi_entry(const std::vector<double>& x, int k, int l) const {
  const int N = dim_;
  if (k == N - 1 || l == N - 1) return (k == l) ? 1.0 : 0.0;
  double r2 = 0.0;
  for (int a = 0; a < N - 1; ++a) r2 += x[a] * x[a];
  const double r = std::sqrt(r2);
  const double por = psiR_prime_over_r(r);
  const double p2 = psiR(r, 2);
  if (r2 < 1e-300) return (k == l) ? p2 : 0.0;
  const double proj = x[k] * x[l] / r2;
  return ((k == l) ? (1.0 - proj) : -proj) * por + proj * p2;
}

WeightTables build_weight_tables(const CylWeight& w, const Grid& grid, WeightKind kind) {
  const int N = grid.dim();
  if (N != w.dim()) throw std::invalid_argument("build_weight_tables: dimension mismatch");
  const auto sz = static_cast<Eigen::Index>(grid.size());

  WeightTables T;
  T.r.resize(grid.size());
  const int npairs = N * (N + 1) / 2;
  T.hess.assign(npairs, Eigen::ArrayXd::Zero(sz));
  T.grad.assign(N, Eigen::ArrayXd::Zero(sz));
  T.lap = Eigen::ArrayXd::Zero(sz);
  T.bilap = Eigen::ArrayXd::Zero(sz);
  T.t1 = Eigen::ArrayXd::Zero(sz);
  T.t2 = Eigen::ArrayXd::Zero(sz);

  std::vector<double> x(N);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (int a = 0; a < N; ++a) x[a] = grid.coord(a, grid.axis_index(i, a));
    double r2 = 0.0;
    for (int a = 0; a < N - 1; ++a) r2 += x[a] * x[a];
    const double r = std::sqrt(r2);
    T.r[i] = r;
    const auto ei = static_cast<Eigen::Index>(i);

    const double por = w.psiR_prime_over_r(r);
    const double p2 = w.psiR(r, 2);
    for (int k = 0; k < N - 1; ++k) {
      for (int l = k; l < N - 1; ++l) {
        double v;
        if (r2 < 1e-300) {
          v = (k == l) ? p2 : 0.0;
        } else {
          const double proj = x[k] * x[l] / r2;
          v = ((k == l) ? (1.0 - proj) : -proj) * por + proj * p2;
        }
        T.hess[T.hess_index(k, l, N)][ei] = v;
      }
      T.grad[k][ei] = por * x[k];
    }
    const bool phi = (kind == WeightKind::Phi);
    T.hess[T.hess_index(N - 1, N - 1, N)][ei] = phi ? 1.0 : 0.0;
    T.grad[N - 1][ei] = phi ? x[N - 1] : 0.0;
    T.lap[ei] = w.lap_psiR(r) + (phi ? 1.0 : 0.0);
    T.bilap[ei] = w.bilap_psiR(r);
    T.t1[ei] = w.tilde1(r);
    T.t2[ei] = w.tilde2(r);
  }
  return T;
}

std::pair<Field, Field> tilde_weights(const CylWeight& w, const GridPtr& grid) {
  Field t1(grid), t2(grid);
  const Grid& g = *grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim() - 1; ++a) {
      const double x = g.coord(a, g.axis_index(i, a));
      r2 += x * x;
    }
    const double r = std::sqrt(r2);
    t1.v[static_cast<Eigen::Index>(i)] = w.tilde1(r);
    t2.v[static_cast<Eigen::Index>(i)] = w.tilde2(r);
  }
  return {std::move(t1), std::move(t2)};
}

} // namespace fnls
