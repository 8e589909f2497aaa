#include "fnls/evolution.hpp"

#include <cmath>
#include <stdexcept>

#include "fnls/spectral_ops.hpp"

namespace fnls {

namespace {

void half_nonlinear(Field& u, double sigma, double dt) {
  to_physical(u);
  const double half = 0.5 * dt;
  for (Eigen::Index i = 0; i < u.v.size(); ++i) {
    const double a2s = std::pow(std::norm(u.v[i]), sigma);
    u.v[i] *= std::polar(1.0, a2s * half);
  }
}

} // namespace

SimulationState init_state(const Field& u0, const ModelParams& params) {
  SimulationState st;
  st.u = in_physical(u0);
  if (!st.u.finite()) throw std::invalid_argument("init_state: non-finite initial data");
  st.mass0 = mass(st.u);
  st.energy0 = energy(st.u, params);
  st.grad0 = sobolev_seminorm(st.u, params.s);
  st.boundary = boundary_mass(st.u);
  return st;
}

void strang_step(SimulationState& state, const ModelParams& params, double dt,
                 bool nonlinear, bool do_dealias) {
  if (!(dt != 0.0)) throw std::invalid_argument("strang_step: dt must be nonzero");
  Field& u = state.u;
  if (nonlinear) half_nonlinear(u, params.sigma, dt);

  to_frequency(u);
  const auto& ksq = u.grid->ksq();
  const auto& mask = u.grid->dealias_mask();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto ei = static_cast<Eigen::Index>(i);
    if (do_dealias && !mask[i]) {
      u.v[ei] = 0.0;
      continue;
    }
    u.v[ei] *= std::polar(1.0, -std::pow(ksq[i], params.s) * dt);
  }
  to_physical(u);

  if (nonlinear) half_nonlinear(u, params.sigma, dt);
  state.t += dt;
  state.dt = dt;
  ++state.steps;
}

EvolveResult evolve(SimulationState state, const ModelParams& params,
                    const EvolveController& ctl,
                    const std::function<void(const SimulationState&)>& sampler) {
  EvolveResult out;
  const double adapt_exp = (params.sigma + params.s) / params.s;

  int persist = 0;
  double G = state.grad0;

  auto record = [&](SimulationState& st) {
    st.boundary = boundary_mass(st.u);
    TimeSample s;
    s.t = st.t;
    s.massv = mass(st.u);
    s.energyv = energy(st.u, params);
    s.grad_s = sobolev_seminorm(st.u, params.s);
    s.boundary = st.boundary;
    out.series.push_back(s);
    G = s.grad_s;
    out.verdict.growth_t.push_back(st.t);
    out.verdict.growth_ratio.push_back(st.grad0 > 0 ? s.grad_s / st.grad0 : 0.0);
    if (sampler) sampler(st);
    return s;
  };

  record(state);

  const double t0 = state.t;
  long sample_idx = 1;
  bool stop = false;
  while (!stop && state.t < ctl.t_end - 1e-15) {
    const double t_next = std::min(ctl.t_end, t0 + sample_idx * ctl.sample_interval);
    // advance to the next sample time with the adaptive rule
    while (state.t < t_next - 1e-15) {
      double dt = ctl.dt0;
      if (ctl.adaptive && state.grad0 > 0.0 && G > state.grad0)
        dt *= std::pow(state.grad0 / G, adapt_exp);
      if (dt < ctl.dt_floor) {
        out.verdict.detected = true;
        out.verdict.t_detect = state.t;
        out.verdict.reason = "step collapse";
        out.status = RunStatus::BlowupDetected;
        stop = true;
        break;
      }
      dt = std::min(dt, t_next - state.t);
      strang_step(state, params, dt, ctl.nonlinear, ctl.do_dealias);
      if (!state.u.finite()) {
        out.verdict.detected = true;
        out.verdict.t_detect = state.t;
        out.verdict.reason = "non-finite field (blow-up suspected)";
        out.status = RunStatus::NumericalFailure;
        stop = true;
        break;
      }
      // keep the step-level gradient reading fresh for the adaptive rule
      if (ctl.adaptive) G = sobolev_seminorm(state.u, params.s);
    }
    if (stop) break;

    const TimeSample s = record(state);
    ++sample_idx;

    if (std::abs(s.massv - state.mass0) / state.mass0 > ctl.mass_drift_bound) {
      out.status = RunStatus::NumericalFailure;
      out.verdict.reason = "mass drift bound exceeded";
      break;
    }
    if (s.boundary / state.mass0 > ctl.boundary_threshold) {
      out.status = RunStatus::DomainBreach;
      out.verdict.reason = "domain too small";
      break;
    }
    if (state.grad0 > 0.0 && s.grad_s / state.grad0 >= ctl.detect_ratio) {
      if (++persist >= ctl.detect_persistence) {
        out.verdict.detected = true;
        out.verdict.t_detect = state.t;
        out.verdict.reason = "gradient-growth";
        out.status = RunStatus::BlowupDetected;
        break;
      }
    } else {
      persist = 0;
    }
  }

  out.state = std::move(state);
  return out;
}

} // namespace fnls
