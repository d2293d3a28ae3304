#pragma once

#include "solution_path.hpp"

namespace klproj {

/// Exact piecewise-linear homotopy for the weighted-L1 least-squares problem
///   min 1/2 ||target - X b||^2 + delta * sum_j w_j |b_j|
/// traced from the fully penalized solution down to delta = 0.  Weight-0
/// columns stay in the active set throughout; weight-capped columns never
/// enter.  A rank-deficient active submatrix truncates the path with a
/// warning instead of failing.
SolutionPath lasso_path_gaussian(const Matrix& X, const Vector& target_mu,
                                 const PenaltySpec& penalty);

}  // namespace klproj
