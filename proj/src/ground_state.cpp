#include "fnls/ground_state.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fnls/spectral_ops.hpp"

namespace fnls {

namespace {

Field gaussian_seed(const GridPtr& grid) {
  return sample(grid, [](const std::vector<double>& x) {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return std::exp(-0.5 * r2);
  });
}

/// sup |(-Delta)^s Q + Q - |Q|^{2 sigma} Q| on the grid.
double equation_residual(const Field& Q, const ModelParams& params) {
  Field lhs = fractional_power(Q, params.s);
  const Field Qp = in_physical(Q);
  lhs.v += Qp.v - Qp.v.abs().pow(2.0 * params.sigma) * Qp.v;
  return lhs.v.abs().maxCoeff();
}

} // namespace

GroundStateResult petviashvili(const ModelParams& params, const GridPtr& grid,
                               const Field* seed, const PetviashviliOptions& opts) {
  params.validate();
  const double sigma = params.sigma;
  const double gamma = (2.0 * sigma + 1.0) / (2.0 * sigma);

  Field Q = seed ? in_physical(*seed) : gaussian_seed(grid);
  if (Q.v.real().minCoeff() < 0.0 || !Q.finite())
    throw std::invalid_argument("petviashvili: seed must be positive and finite");
  Q.v = Q.v.real();

  const auto& ksq = grid->ksq();
  const double pw = grid->cell_volume() / static_cast<double>(grid->size());

  std::ostringstream trace;
  int iter = 0;
  double change = 1.0;
  for (; iter < opts.max_iter; ++iter) {
    // <Q, ((-Delta)^s + 1) Q> via Plancherel.
    Field Qh = in_frequency(Q);
    double num = 0.0;
    for (std::size_t i = 0; i < Qh.size(); ++i)
      num += (std::pow(ksq[i], params.s) + 1.0) *
             std::norm(Qh.v[static_cast<Eigen::Index>(i)]);
    num *= pw;

    Field W = Q;
    W.v = W.v.real().abs().pow(2.0 * sigma + 1.0);
    const double den = (Q.v.real() * W.v.real()).sum() * grid->cell_volume();
    const double S = num / den;
    trace << "iter " << iter << " S=" << S << "\n";
    if (!(S > 1e-6 && S < 1e6))
      throw std::runtime_error("petviashvili: iteration diverged (S=" +
                               std::to_string(S) + ")\n" + trace.str());

    to_frequency(W);
    for (std::size_t i = 0; i < W.size(); ++i)
      W.v[static_cast<Eigen::Index>(i)] /= std::pow(ksq[i], params.s) + 1.0;
    to_physical(W);
    W.v = std::pow(S, gamma) * W.v.real();

    const double diff = std::sqrt((W.v - Q.v).abs2().sum() * grid->cell_volume());
    const double norm = std::sqrt(mass(W));
    change = diff / norm;
    Q = std::move(W);
    if (change < opts.tol_change) {
      ++iter;
      break;
    }
  }

  GroundStateResult res;
  res.residual = equation_residual(Q, params);
  res.iterations = iter;
  if (change >= opts.tol_change || res.residual > opts.tol_residual)
    throw std::runtime_error("petviashvili: not converged after " +
                             std::to_string(iter) + " iterations (change=" +
                             std::to_string(change) + ", residual=" +
                             std::to_string(res.residual) + ")");

  res.mass_Q = mass(Q);
  res.energy_Q = energy(Q, params);
  res.grad_s_Q = sobolev_seminorm(Q, params.s);
  const double sc = params.s_c();
  if (!params.energy_critical()) {
    if (res.energy_Q >= 0.0)
      res.threshold_EM = std::pow(res.energy_Q, sc) * std::pow(res.mass_Q, params.s - sc);
    res.threshold_grad =
        res.grad_s_Q * res.grad_s_Q * std::pow(std::sqrt(res.mass_Q), params.s - sc);
  }
  res.Q = std::move(Q);
  return res;
}

double ThresholdRecord::lhs_EM(double E0, double M0) const {
  if (energy_critical) return E0;
  return std::pow(E0, s_c) * std::pow(M0, s - s_c);
}

double ThresholdRecord::lhs_grad(double G0, double M0) const {
  if (energy_critical) return G0 * G0;
  return G0 * G0 * std::pow(std::sqrt(M0), s - s_c);
}

bool ThresholdRecord::c1_satisfied(double E0, double M0) const {
  if (energy_critical) return E0 < energy_Q;
  if (E0 < 0.0) return true;  // the negative-energy branch subsumes (c1)
  return rhs_EM && lhs_EM(E0, M0) < *rhs_EM;
}

bool ThresholdRecord::c2_satisfied(double G0, double M0) const {
  if (energy_critical) return G0 > grad_s_Q;
  return rhs_grad && lhs_grad(G0, M0) > *rhs_grad;
}

ThresholdRecord thresholds(const GroundStateResult& result, const ModelParams& params) {
  const double sc = params.s_c();
  if (!(sc > 0.0))
    throw std::invalid_argument("thresholds: criterion applies to the mass-supercritical range only (s_c > 0)");
  if (!(sc <= params.s + 1e-12))
    throw std::invalid_argument("thresholds: s_c must not exceed s");
  ThresholdRecord rec;
  rec.s_c = sc;
  rec.s = params.s;
  rec.energy_critical = params.energy_critical();
  rec.energy_Q = result.energy_Q;
  rec.grad_s_Q = result.grad_s_Q;
  if (!rec.energy_critical) {
    rec.rhs_EM = result.threshold_EM;
    rec.rhs_grad = result.threshold_grad;
  }
  return rec;
}

} // namespace fnls
