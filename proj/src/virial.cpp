#include "fnls/virial.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fnls/spectral_ops.hpp"

namespace fnls {

namespace {

double virial_value(const Field& u, const WeightTables& tables) {
  const Field up = in_physical(u);
  const std::vector<Field> grads = gradient(up);
  const int N = u.grid->dim();
  Eigen::ArrayXcd dot = Eigen::ArrayXcd::Zero(up.v.size());
  for (int a = 0; a < N; ++a) dot += tables.grad[a] * grads[a].v;
  return 2.0 * (up.v.conjugate() * dot).imag().sum() * u.grid->cell_volume();
}

double balakrishnan_constant(double s) {
  return std::sqrt(std::sin(std::numbers::pi * s) / std::numbers::pi);
}

} // namespace

double virial_phi(const Field& u, const WeightTables& tables) {
  return virial_value(u, tables);
}

double virial_psi(const Field& u, const WeightTables& tables) {
  return virial_value(u, tables);
}

Field resolvent(const Field& u, double m, double s) {
  if (!(m > 0.0)) throw std::invalid_argument("resolvent: m must be positive");
  const double cs = balakrishnan_constant(s);
  const Space in_space = u.space;
  Field out = in_frequency(u);
  const auto& ksq = u.grid->ksq();
  for (std::size_t i = 0; i < out.size(); ++i)
    out.v[static_cast<Eigen::Index>(i)] *= cs / (ksq[i] + m);
  if (in_space == Space::Physical) to_physical(out);
  return out;
}

BalakrishnanCheck balakrishnan_check(const Field& u, const ResolventQuadrature& quad) {
  quad.check_gate();
  const Field uh = in_frequency(u);
  const double s = quad.s();
  BalakrishnanCheck out;
  for (std::size_t j = 0; j < quad.nodes().size(); ++j) {
    const Field um = resolvent(uh, quad.nodes()[j], s);
    double grad2 = 0.0;
    for (const Field& g : gradient(um)) grad2 += mass(g);
    out.lhs += quad.weights()[j] * grad2;
  }
  const double gs = sobolev_seminorm(u, s);
  out.rhs = s * gs * gs;
  const double denom = std::max(std::abs(out.rhs), 1e-300);
  out.rel_error = std::abs(out.lhs - out.rhs) / denom;
  return out;
}

VirialReport virial_rhs(const Field& u, const WeightTables& tables,
                        const ResolventQuadrature& quad, const ModelParams& params,
                        WeightKind kind, double R, bool include_nonlinear) {
  quad.check_gate();
  const int N = u.grid->dim();
  const double vol = u.grid->cell_volume();
  const double s = params.s;

  VirialReport rep;
  rep.R = R;
  rep.M_value = virial_value(u, tables);

  const Field uh = in_frequency(u);
  for (std::size_t j = 0; j < quad.nodes().size(); ++j) {
    const double w = quad.weights()[j];
    const Field um_h = resolvent(uh, quad.nodes()[j], s);
    const std::vector<Field> g = gradient(um_h);

    double contraction = 0.0;
    for (int k = 0; k < N; ++k) {
      for (int l = k; l < N; ++l) {
        const auto& H = tables.hess[tables.hess_index(k, l, N)];
        const double term = (g[k].v.conjugate() * H * g[l].v).real().sum();
        contraction += (k == l) ? term : 2.0 * term;
      }
    }
    rep.kinetic += w * 4.0 * contraction * vol;

    Eigen::ArrayXd grad_y2 = Eigen::ArrayXd::Zero(u.v.size());
    for (int a = 0; a < N - 1; ++a) grad_y2 += g[a].v.abs2();
    rep.cross_term += w * 4.0 * (tables.t1 * grad_y2).sum() * vol;

    const Field um = in_physical(um_h);
    rep.bilap -= w * (tables.bilap * um.v.abs2()).sum() * vol;
  }

  const double gs = sobolev_seminorm(u, s);
  rep.kinetic_bound = 4.0 * s * gs * gs;

  if (include_nonlinear) {
    const Field up = in_physical(u);
    const double p = 2.0 * params.sigma + 2.0;
    const Eigen::ArrayXd up_p = up.v.abs().pow(p);
    const double coef = -2.0 * params.sigma / (params.sigma + 1.0);
    rep.nonlinear = coef * (tables.lap * up_p).sum() * vol;

    // Split form: the tail integrand (Lap psi_R - N + 1) = -t2 vanishes on
    // r < R, so restricting the sum to r >= R must change nothing.
    const double lead = (kind == WeightKind::Phi) ? N : N - 1;
    double tail = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      if (tables.r[i] >= R) tail -= tables.t2[static_cast<Eigen::Index>(i)] *
                                    up_p[static_cast<Eigen::Index>(i)];
    rep.nonlinear_split = coef * (lead * up_p.sum() + tail) * vol;
  }

  rep.rhs_total = rep.kinetic + rep.bilap + rep.nonlinear;
  return rep;
}

std::vector<ResidualSample> virial_residual(
    const std::vector<std::pair<double, Field>>& snapshots, const WeightTables& tables,
    const ResolventQuadrature& quad, const ModelParams& params, WeightKind kind,
    double R, bool include_nonlinear) {
  const std::size_t n = snapshots.size();
  if (n < 3)
    throw std::invalid_argument("virial_residual: need at least 3 snapshots");
  const double dt = snapshots[1].first - snapshots[0].first;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = snapshots[i].first - snapshots[i - 1].first;
    if (std::abs(d - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw std::invalid_argument("virial_residual: non-uniform sampling");
  }

  std::vector<double> M(n);
  for (std::size_t i = 0; i < n; ++i) M[i] = virial_value(snapshots[i].second, tables);

  std::vector<ResidualSample> out;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const VirialReport rep = virial_rhs(snapshots[i].second, tables, quad, params,
                                        kind, R, include_nonlinear);
    ResidualSample rs;
    rs.t = snapshots[i].first;
    rs.dMdt_fd = (M[i + 1] - M[i - 1]) / (2.0 * dt);
    rs.rhs = rep.rhs_total;
    rs.residual = rs.dMdt_fd - rs.rhs;
    rs.scale = std::max({std::abs(rep.kinetic), std::abs(rep.bilap),
                         std::abs(rep.nonlinear), std::abs(rs.dMdt_fd),
                         rep.kinetic_bound});
    out.push_back(rs);
  }
  return out;
}

RefinedTerms refined_terms(const Field& u, const WeightTables& tables,
                           const CylWeight& weight, const ResolventQuadrature& quad,
                           const ModelParams& params, double eta, double energy_u0) {
  if (!params.mass_critical(1e-10))
    throw std::invalid_argument("refined_terms: requires the mass-critical coupling sigma = 2s/N");
  if (!(eta > 0.0)) throw std::invalid_argument("refined_terms: eta must be positive");
  quad.check_gate();

  const int N = u.grid->dim();
  const double s = params.s;
  const double vol = u.grid->cell_volume();
  const double R = weight.R();

  RefinedTerms out;

  const Field uh = in_frequency(u);
  for (std::size_t j = 0; j < quad.nodes().size(); ++j) {
    const double w = quad.weights()[j];
    const Field um_h = resolvent(uh, quad.nodes()[j], s);
    std::vector<int> yaxes(N - 1);
    for (int a = 0; a < N - 1; ++a) yaxes[a] = a;
    const std::vector<Field> gy = gradient_axes(um_h, yaxes);
    Eigen::ArrayXd grad_y2 = Eigen::ArrayXd::Zero(u.v.size());
    for (const Field& g : gy) grad_y2 += g.v.abs2();
    out.t1_term += w * 4.0 * (tables.t1 * grad_y2).sum() * vol;

    const Field um = in_physical(um_h);
    out.bilap_term -= w * (tables.bilap * um.v.abs2()).sum() * vol;
  }

  const Field up = in_physical(u);
  const double p = 4.0 * s / N + 2.0;
  const Eigen::ArrayXd up_p = up.v.abs().pow(p);
  double tail = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (tables.r[i] >= R) tail += tables.t2[static_cast<Eigen::Index>(i)] *
                                  up_p[static_cast<Eigen::Index>(i)];
  out.tail_term = (4.0 * s / (N + 2.0 * s)) * tail * vol;

  // eta-split components of the Young-inequality bound on the tail.
  const double pw = static_cast<double>(N) / (2.0 * N + 4.0 * s);
  Field weighted = up;
  for (std::size_t i = 0; i < u.size(); ++i)
    weighted.v[static_cast<Eigen::Index>(i)] *=
        std::pow(tables.t2[static_cast<Eigen::Index>(i)], pw);
  const double gw = sobolev_seminorm(weighted, s);
  out.eta_grad = eta * gw * gw;
  out.eta_tail_scale = std::pow(eta, -1.0 / (N - 1.0)) *
                       std::pow(R, -2.0 * s * (N - 2.0) / (N - 1.0));

  out.leading = 8.0 * s * energy_u0;
  out.remainder = out.tail_term + std::abs(out.bilap_term);
  return out;
}

} // namespace fnls
