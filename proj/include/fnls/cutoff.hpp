#pragma once

#include <vector>

#include "fnls/field.hpp"

namespace fnls {

/// Smooth radial cutoff profile psi with
///   psi(r) = r^2/2 for r <= 1,   psi constant for r >= 10,
///   psi''(r) <= 1, psi'(r) >= 0, psi'(r)/r <= 1 everywhere.
/// Built as psi'(r) = r h(r) with h a C^infinity transition from 1 to 0 on
/// [1,10] (standard bump ratio in t = (r-1)/9). Derivatives through fourth
/// order come from closed-form differentiation of the bump; psi itself is
/// tabulated once by high-order panel quadrature of psi'.
class CutoffProfile {
public:
  CutoffProfile();

  /// psi^(order)(r), order in 0..4. Rejects r < 0.
  double eval(double r, int order) const;

  /// psi'(r)/r with the removable singularity at r = 0 evaluated as psi''(0).
  double dpsi_over_r(double r) const;

  /// Transition function h(r) and its first three derivatives.
  double h(double r, int order = 0) const;

private:
  double psi_integral(double r) const; // int_1^r rho h(rho) drho for r in (1,10)

  std::vector<double> cum_;  // cumulative integral at panel edges over [1,10]
  int panels_ = 0;
  double psi_inf_ = 0.0;     // psi(10) = psi(r >= 10)
};

/// Cylindrical weight pair built from a cutoff profile at scale R:
///   psi_R(r)  = R^2 psi(r/R)  on R^{N-1},  r = |y|,
///   phi_R(x)  = psi_R(|y|) + x_N^2/2.
/// All radial derivatives, the (N-1)-dimensional Laplacian/bi-Laplacian and
/// the Hessian of phi_R are evaluated in closed form.
class CylWeight {
public:
  CylWeight(const CutoffProfile& profile, int dim, double R);

  int dim() const { return dim_; }
  double R() const { return R_; }

  double psiR(double r, int order = 0) const;
  double psiR_prime_over_r(double r) const;
  /// (N-1)-dimensional radial Laplacian of psi_R.
  double lap_psiR(double r) const;
  double bilap_psiR(double r) const;

  double phi(const std::vector<double>& x) const;
  double lap_phi(double r) const { return lap_psiR(r) + 1.0; }
  double bilap_phi(double r) const { return bilap_psiR(r); }

  /// Hessian entry (k,l) of phi_R at x. Uses
  ///   (delta_kl - y_k y_l / r^2) psi_R'(r)/r + (y_k y_l / r^2) psi_R''(r)
  /// for the y-block, 0 for mixed entries, 1 for (N,N).
  double hessian_phi_entry(const std::vector<double>& x, int k, int l) const;

  double tilde1(double r) const { return 1.0 - psiR(r, 2); }
  double tilde2(double r) const { return dim_ - 1.0 - lap_psiR(r); }

private:
  const CutoffProfile* profile_;
  int dim_;
  double R_;
};

/// Grid samples of the weight machinery used by the virial diagnostics.
struct WeightTables {
  std::vector<double> r;             // |y| per grid point
  std::vector<Eigen::ArrayXd> hess;  // packed upper triangle (k <= l), row-major
  Eigen::ArrayXd grad_dot;           // unused slot kept empty
  std::vector<Eigen::ArrayXd> grad;  // grad phi_R (or grad psi_R) components
  Eigen::ArrayXd lap;                // Laplacian of the weight
  Eigen::ArrayXd bilap;              // bi-Laplacian of the weight
  Eigen::ArrayXd t1;                 // 1 - psi_R''
  Eigen::ArrayXd t2;                 // N - 1 - Lap psi_R

  int hess_index(int k, int l, int dim) const {
    if (k > l) std::swap(k, l);
    return k * dim - k * (k - 1) / 2 + (l - k);
  }
};

enum class WeightKind { Phi, Psi };

/// Sample hessian/gradient/Laplacian tables of phi_R (full virial weight)
/// or psi_R (the Sigma-class variant, no x_N part) on a grid.
WeightTables build_weight_tables(const CylWeight& w, const Grid& grid, WeightKind kind);

/// The pair (1 - psi_R'', N-1 - Lap psi_R) sampled on the grid; both are
/// nonnegative and vanish on r <= R.
std::pair<Field, Field> tilde_weights(const CylWeight& w, const GridPtr& grid);

} // namespace fnls
