#pragma once

// Internal helpers shared by the solver sources.

#include <vector>

#include <Eigen/SparseCore>

#include "circadia/eigensolvers.hpp"

namespace circadia::detail {

/// Coefficients of -d^2/dq^2 in 4th-order central differences, offsets 0, 1, 2.
inline void fd4_coefficients(double h, double& c0, double& c1, double& c2) {
  c0 = 5.0 / (2.0 * h * h);
  c1 = -4.0 / (3.0 * h * h);
  c2 = 1.0 / (12.0 * h * h);
}

/// Diagonal of the stencil at interior node i of n next to Dirichlet walls.
/// The ghost node behind a wall is the odd reflection u(-h) = -u(h), exact for
/// eigenfunctions (u and u'' vanish at the wall), which keeps 4th order there.
inline double fd4_box_diagonal(int i, int n, double c0, double c2) {
  return (i == 0 || i == n - 1) ? c0 - c2 : c0;
}

/// Banded Dirichlet operator kinetic * (-d^2/dq^2) + diag(v).
inline BandedMatrix fd4_box(const std::vector<double>& v, double h, double kinetic) {
  const int n = int(v.size());
  double c0, c1, c2;
  fd4_coefficients(h, c0, c1, c2);
  BandedMatrix a(n, std::min(2, n - 1));
  for (int i = 0; i < n; ++i) {
    a.set(i, i, kinetic * fd4_box_diagonal(i, n, c0, c2) + v[i]);
    if (i + 1 < n) a.set(i, i + 1, kinetic * c1);
    if (i + 2 < n) a.set(i, i + 2, kinetic * c2);
  }
  return a;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

}  // namespace circadia::detail
