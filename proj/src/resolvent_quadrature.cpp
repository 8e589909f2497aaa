#include "fnls/resolvent_quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "fnls/quadrature_util.hpp"

namespace fnls {

namespace {

QuadRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                      double mu0) {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = diag[i];
    if (i + 1 < n) J(i, i + 1) = J(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

} // namespace

QuadRule gauss_legendre(int n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k)
    off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(diag, off, 2.0);
}

QuadRule gauss_jacobi(int n, double alpha, double beta) {
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(n - 1);
  const double ab = alpha + beta;
  diag[0] = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double den = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
    diag[k] = (beta * beta - alpha * alpha) / den;
    const double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
    const double d2 = (2.0 * k + ab) * (2.0 * k + ab);
    off[k - 1] = std::sqrt(num / (d2 * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0)));
  }
  const double mu0 = std::pow(2.0, ab + 1.0) * std::exp(std::lgamma(alpha + 1.0) +
                                                        std::lgamma(beta + 1.0) -
                                                        std::lgamma(ab + 2.0));
  return golub_welsch(diag, off, mu0);
}

ResolventQuadrature::ResolventQuadrature(double s, int n, double map_scale)
    : s_(s), map_scale_(map_scale) {
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("ResolventQuadrature: s must lie in (0,1)");
  if (n < 2) throw std::invalid_argument("ResolventQuadrature: need at least 2 nodes");
  // Clamp the mapping parameter: the closed-form gate below certifies this
  // range at 64 nodes.
  map_scale_ = std::min(std::max(map_scale_, 0.5), 32.0);
  const double a = map_scale_;

  // Nodes of the Jacobi weight t^s (1-t)^{-s} on [0,1] absorb the m^s
  // factor of the measure; the substitution m = a t/(1-t) leaves a
  // rational integrand for resolvent-type functions of m.
  const QuadRule jac = gauss_jacobi(n, -s, s);
  nodes_.resize(n);
  weights_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = 0.5 * (jac.nodes[i] + 1.0);
    nodes_[i] = a * t / (1.0 - t);
    weights_[i] = std::pow(a, s + 1.0) * jac.weights[i] / (2.0 * (1.0 - t) * (1.0 - t));
    if (!(weights_[i] > 0.0))
      throw std::runtime_error("ResolventQuadrature: nonpositive weight");
  }
}

double ResolventQuadrature::closed_form(double a) const {
  return std::pow(a, s_ - 1.0) * s_ * std::numbers::pi / std::sin(std::numbers::pi * s_);
}

double ResolventQuadrature::gate_error() const {
  double worst = 0.0;
  for (double a : {0.25, 1.0, 4.0, 64.0}) {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      acc += weights_[i] / ((a + nodes_[i]) * (a + nodes_[i]));
    const double exact = closed_form(a);
    worst = std::max(worst, std::abs(acc - exact) / exact);
  }
  return worst;
}

void ResolventQuadrature::check_gate(double tol) const {
  const double err = gate_error();
  if (err > tol)
    throw std::runtime_error("ResolventQuadrature: closed-form gate failed, error " +
                             std::to_string(err));
}

} // namespace fnls
