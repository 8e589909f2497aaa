#pragma once

#include <utility>
#include <vector>

#include "fnls/cutoff.hpp"
#include "fnls/field.hpp"
#include "fnls/model.hpp"
#include "fnls/resolvent_quadrature.hpp"

namespace fnls {

/// Localized virial quantity 2 Im int conj(u) (grad phi_R . grad u) dx.
double virial_phi(const Field& u, const WeightTables& tables);
/// Sigma-class variant with psi_R: the weight gradient has no x_N part.
double virial_psi(const Field& u, const WeightTables& tables);

/// Resolvent family member c_s ((-Delta) + m)^{-1} u with
/// c_s = sqrt(sin(pi s)/pi).
Field resolvent(const Field& u, double m, double s);

struct BalakrishnanCheck {
  double lhs = 0.0;  ///< sum_j w_j int |grad u_{m_j}|^2 dx
  double rhs = 0.0;  ///< s ||(-Delta)^{s/2} u||_2^2
  double rel_error = 0.0;
};

/// Identity int_0^inf m^s int |grad u_m|^2 dx dm = s ||(-Delta)^{s/2} u||^2,
/// with the left side evaluated through the quadrature and physical-space
/// gradients of the resolvent family.
BalakrishnanCheck balakrishnan_check(const Field& u, const ResolventQuadrature& quad);

/// Term-by-term right-hand side of the virial identity
///   d/dt M_phi = int m^s (4 sum_kl d_k conj(u_m) H_kl(phi) d_l u_m
///                         - (Lap^2 phi) |u_m|^2) dm
///                - 2 sigma/(sigma+1) int (Lap phi) |u|^{2 sigma + 2}.
struct VirialReport {
  double R = 0.0;
  double M_value = 0.0;        ///< M_{phi_R} (or M_{psi_R}) of the field
  double kinetic = 0.0;        ///< Hessian-contracted gradient term
  double bilap = 0.0;          ///< -int int m^s (Lap^2 phi) |u_m|^2
  double nonlinear = 0.0;      ///< -(2 sigma/(sigma+1)) int (Lap phi)|u|^{2s+2}
  double rhs_total = 0.0;
  /// Nonlinear term evaluated through the split
  ///   N int |u|^{2s+2} + int_{|y|>=R} (Lap psi_R - N + 1) |u|^{2s+2}
  /// (N-1 in place of N for the psi variant); must equal `nonlinear`
  /// up to roundoff.
  double nonlinear_split = 0.0;
  /// 4 s ||(-Delta)^{s/2} u||^2, the upper bound on the kinetic term.
  double kinetic_bound = 0.0;
  /// Cross term 4 int int m^s (1 - psi_R'') |grad_y u_m|^2 (>= 0); the
  /// kinetic term equals its bound minus this for the phi weight.
  double cross_term = 0.0;
};

VirialReport virial_rhs(const Field& u, const WeightTables& tables,
                        const ResolventQuadrature& quad, const ModelParams& params,
                        WeightKind kind, double R, bool include_nonlinear = true);

struct ResidualSample {
  double t = 0.0;
  double dMdt_fd = 0.0;   ///< centered finite difference of M
  double rhs = 0.0;       ///< identity right-hand side at the same time
  double residual = 0.0;  ///< dMdt_fd - rhs
  double scale = 0.0;     ///< max |term| used for relative comparison
};

/// Centered-difference check of the virial identity along uniformly sampled
/// trajectory snapshots (>= 3 required; rejects non-uniform sampling).
std::vector<ResidualSample> virial_residual(
    const std::vector<std::pair<double, Field>>& snapshots, const WeightTables& tables,
    const ResolventQuadrature& quad, const ModelParams& params, WeightKind kind,
    double R, bool include_nonlinear = true);

/// Refined mass-critical decomposition (sigma = 2s/N required):
/// the nonnegative tilde-psi_1 kinetic defect, the weighted nonlinear tail,
/// and the eta-split bound components.
struct RefinedTerms {
  double t1_term = 0.0;        ///< 4 int int m^s (1 - psi_R'') |grad_y u_m|^2 >= 0
  double tail_term = 0.0;      ///< (4s/(N+2s)) int_{|y|>=R} (N-1-Lap psi_R)|u|^{4s/N+2}
  double bilap_term = 0.0;     ///< measured -int int m^s (Lap^2 phi_R)|u_m|^2
  double eta_grad = 0.0;       ///< eta ||(-D)^{s/2}(t2^{N/(2N+4s)} u)||^2
  double eta_tail_scale = 0.0; ///< eta^{-1/(N-1)} R^{-2s(N-2)/(N-1)}
  double leading = 0.0;        ///< 8 s E(u0)
  double remainder = 0.0;      ///< tail_term + |bilap_term|
};

RefinedTerms refined_terms(const Field& u, const WeightTables& tables,
                           const CylWeight& weight, const ResolventQuadrature& quad,
                           const ModelParams& params, double eta, double energy_u0);

} // namespace fnls
