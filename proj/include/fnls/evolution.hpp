#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fnls/field.hpp"
#include "fnls/model.hpp"

namespace fnls {

struct SimulationState {
  double t = 0.0;
  Field u;
  double dt = 0.0;          ///< last step actually taken
  double mass0 = 0.0;       ///< M[u0]
  double energy0 = 0.0;     ///< E[u0]
  double grad0 = 0.0;       ///< ||(-Delta)^{s/2} u0||_2
  long steps = 0;
  double boundary = 0.0;    ///< latest boundary-mass reading
};

struct BlowupVerdict {
  bool detected = false;
  double t_detect = 0.0;
  std::string reason;                 ///< "gradient-growth", "step collapse", ...
  std::vector<double> growth_t;       ///< sample times of the growth series
  std::vector<double> growth_ratio;   ///< G(t)/G(0) at those times
};

enum class RunStatus { Completed, BlowupDetected, DomainBreach, NumericalFailure };

struct EvolveController {
  double dt0 = 1e-3;
  double t_end = 1.0;
  double sample_interval = 1e-2;
  bool adaptive = true;          ///< dt = dt0 min(1, (G0/G)^{(sigma+s)/s})
  bool nonlinear = true;         ///< switch off to integrate the free flow
  bool do_dealias = true;
  double detect_ratio = 50.0;
  int detect_persistence = 10;
  double boundary_threshold = 1e-8;
  double mass_drift_bound = 1e-6;
  double dt_floor = 1e-12;
};

struct TimeSample {
  double t;
  double massv;
  double energyv;
  double grad_s;
  double boundary;
};

/// Initialize a simulation state from initial data.
SimulationState init_state(const Field& u0, const ModelParams& params);

/// One Strang step: exact half nonlinear flow, exact linear flow in
/// frequency space (with the 2/3 dealias mask applied there once per full
/// step), exact half nonlinear flow. Both substeps preserve |u| pointwise
/// or are unitary, so mass is conserved to roundoff.
void strang_step(SimulationState& state, const ModelParams& params, double dt,
                 bool nonlinear = true, bool do_dealias = true);

struct EvolveResult {
  SimulationState state;
  BlowupVerdict verdict;
  std::vector<TimeSample> series;
  RunStatus status = RunStatus::Completed;
};

/// Advance to t_end with adaptive steps, landing exactly on the uniform
/// sample times. The optional sampler runs at every sample point (used by
/// the harness to add virial columns).
EvolveResult evolve(SimulationState state, const ModelParams& params,
                    const EvolveController& ctl,
                    const std::function<void(const SimulationState&)>& sampler = {});

} // namespace fnls
