#pragma once

#include <optional>
#include <vector>

#include "fnls/field.hpp"
#include "fnls/model.hpp"

namespace fnls {

struct PetviashviliOptions {
  double tol_change = 1e-10;   ///< successive relative L2 change
  double tol_residual = 1e-8;  ///< sup norm of the equation residual
  int max_iter = 5000;
};

/// Ground state Q of (-Delta)^s Q + Q - |Q|^{2 sigma} Q = 0 together with
/// the threshold quantities of the blow-up criteria. All thresholds are
/// computed from this Q, not from external tables.
struct GroundStateResult {
  Field Q;                       ///< real, positive, radially nonincreasing
  double residual = 0.0;         ///< sup |(-Delta)^s Q + Q - Q^{2 sigma + 1}|
  int iterations = 0;
  double mass_Q = 0.0;           ///< M[Q]
  double energy_Q = 0.0;         ///< E[Q]
  double grad_s_Q = 0.0;         ///< ||(-Delta)^{s/2} Q||_2
  /// E[Q]^{s_c} M[Q]^{s - s_c}; empty when E[Q] < 0 with noninteger s_c,
  /// or when s_c = s (Q has no L2 threshold there).
  std::optional<double> threshold_EM;
  /// ||(-Delta)^{s/2} Q||_2^2 ||Q||_2^{s - s_c}.
  std::optional<double> threshold_grad;
};

/// Normalized fixed-point iteration
///   Q_{n+1} = S_n^gamma K(Q_n^{2 sigma + 1}),  K = ((-Delta)^s + 1)^{-1},
///   S_n = <Q_n, ((-Delta)^s + 1) Q_n> / <Q_n^{2 sigma + 1}, Q_n>,
/// with stabilization exponent gamma = (2 sigma + 1)/(2 sigma).
/// Seed defaults to the Gaussian e^{-|x|^2/2}. Throws on divergence
/// (S_n escaping [1e-6, 1e6]) with the iteration trace in the message.
GroundStateResult petviashvili(const ModelParams& params, const GridPtr& grid,
                               const Field* seed = nullptr,
                               const PetviashviliOptions& opts = {});

/// Q-side threshold record of conditions (c1)/(c2) with evaluators for
/// candidate initial data. Requires the mass-supercritical range
/// 0 < s_c <= s; at s_c = s only the energy/gradient comparisons survive.
struct ThresholdRecord {
  double s_c = 0.0;
  double s = 0.0;
  bool energy_critical = false;  ///< s_c = s: compare E and grad norm only
  double energy_Q = 0.0;
  double grad_s_Q = 0.0;
  std::optional<double> rhs_EM;    ///< E[Q]^{s_c} M[Q]^{s-s_c}
  std::optional<double> rhs_grad;  ///< ||(-D)^{s/2}Q||^2 ||Q||^{s-s_c}

  /// Left side of (c1) for data with energy E0 and mass M0; (c1) asks lhs < rhs.
  double lhs_EM(double E0, double M0) const;
  /// Left side of (c2) for data with gradient norm G0 and mass M0; (c2) asks lhs > rhs.
  double lhs_grad(double G0, double M0) const;
  bool c1_satisfied(double E0, double M0) const;
  bool c2_satisfied(double G0, double M0) const;
};

ThresholdRecord thresholds(const GroundStateResult& result, const ModelParams& params);

} // namespace fnls
