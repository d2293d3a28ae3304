#pragma once

#include "types.hpp"

namespace klproj {

/// Solution of min 0.5 t'Qt - q't subject to C t <= d.
struct QpResult {
  Vector theta;
  std::vector<Index> active;  ///< rows of C in the final working set
  Vector multipliers;         ///< one per active row, nonnegative at optimum
  bool converged = false;
  int iterations = 0;
};

/// Primal active-set method for a strictly convex QP with inequality
/// constraints. theta0 must be feasible; iterates stay feasible. Constraint
/// rows are kept linearly independent in the working set.
QpResult solve_qp_ineq(const Matrix& Q, const Vector& q, const Matrix& C, const Vector& d,
                       const Vector& theta0, int max_iter = 500, double tol = 1e-10);

}  // namespace klproj
