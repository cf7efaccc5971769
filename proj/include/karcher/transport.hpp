#pragma once

// Exact balanced transportation problem solved by the network simplex method
// on the bipartite supply/demand graph.

#include <vector>

#include "karcher/spd.hpp"

namespace karcher {

struct TransportSolution {
  Matrix plan;   // k×m, nonnegative
  double cost = 0.0;
  Vector u;      // row potentials
  Vector v;      // column potentials; u_i + v_j ≤ c_ij with equality on the basis
  int pivots = 0;
};

/// Minimizes Σ c_ij·x_ij subject to row sums `a` and column sums `b`.
/// `a` and `b` must be nonnegative with equal totals (within rounding).
TransportSolution solve_transport(const Matrix& cost, const std::vector<double>& a,
                                  const std::vector<double>& b);

}  // namespace karcher
