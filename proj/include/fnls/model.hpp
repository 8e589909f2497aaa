#pragma once

#include <cmath>
#include <stdexcept>

namespace fnls {

/// Parameters of the focusing fractional NLS
///   i u_t = (-Delta)^s u - |u|^{2 sigma} u   on R^N,
/// together with the derived criticality index s_c = N/2 - s/sigma.
struct ModelParams {
  int dim = 3;          ///< spatial dimension N
  double s = 0.7;       ///< fractional order, 0 < s < 1
  double sigma = 0.6;   ///< nonlinearity power, sigma > 0

  ModelParams() = default;
  ModelParams(int N_, double s_, double sigma_) : dim(N_), s(s_), sigma(sigma_) {
    validate();
  }

  double s_c() const { return 0.5 * dim - s / sigma; }

  bool mass_critical(double tol = 1e-12) const {
    return std::abs(sigma - 2.0 * s / dim) < tol;
  }
  bool mass_supercritical() const { return s_c() > 0.0; }
  bool sigma_leq_s() const { return sigma <= s; }
  bool energy_critical(double tol = 1e-12) const {
    return std::abs(s_c() - s) < tol;
  }

  /// Energy-subcritical admissibility: sigma < 2s/(N-2s) whenever N > 2s.
  void validate() const {
    if (dim < 1) throw std::invalid_argument("ModelParams: dimension must be >= 1");
    if (!(s > 0.0 && s < 1.0))
      throw std::invalid_argument("ModelParams: fractional order s must lie in (0,1)");
    if (!(sigma > 0.0))
      throw std::invalid_argument("ModelParams: sigma must be positive");
    if (dim > 2.0 * s && sigma >= 2.0 * s / (dim - 2.0 * s))
      throw std::invalid_argument("ModelParams: sigma >= 2s/(N-2s), energy-supercritical");
  }
};

} // namespace fnls
