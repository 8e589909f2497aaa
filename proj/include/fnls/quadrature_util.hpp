#pragma once

#include <vector>

namespace fnls {

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
QuadRule gauss_legendre(int n);

/// n-point Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta on [-1, 1].
QuadRule gauss_jacobi(int n, double alpha, double beta);

} // namespace fnls
