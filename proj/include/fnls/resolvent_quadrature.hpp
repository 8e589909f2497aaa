#pragma once

#include <vector>

namespace fnls {

/// Nodes m_j > 0 and weights w_j discretizing the improper integral
///   int_0^infty m^s f(m) dm  ~=  sum_j w_j f(m_j)
/// for resolvent-type integrands f. Built from a Gauss-Jacobi rule whose
/// weight absorbs the m^s factor under the substitution m = a t/(1-t).
///
/// The rule certifies itself against the Beta-integral closed form
///   int_0^infty m^s/(a+m)^2 dm = a^{s-1} s pi / sin(pi s);
/// call check_gate() before trusting any diagnostic built on it.
class ResolventQuadrature {
public:
  ResolventQuadrature(double s, int n = 64, double map_scale = 4.0);

  double s() const { return s_; }
  double map_scale() const { return map_scale_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  double closed_form(double a) const;
  /// Worst relative error of the closed-form identity over a in {1/4,1,4,64}.
  double gate_error() const;
  void check_gate(double tol = 1e-8) const;

private:
  double s_;
  double map_scale_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

} // namespace fnls
