#pragma once

#include "dataset.hpp"
#include "solution_path.hpp"

namespace klproj {

/// Penalized GLM objective
///   -loglik(pseudo_y; b) + delta * sum_j w_j |b_j| + gamma_ridge * sum_j b_j^2
/// solved by coordinate descent over IRLS reweightings.  Converged when the
/// max coefficient change drops below tol or after max_outer reweightings;
/// five consecutive objective increases mark the point as diverged.
Vector glm_penalized_solve(const Matrix& X, const Vector& pseudo_y, const Vector& A,
                           FamilyKind kind, const PenaltySpec& penalty, double delta,
                           Vector warm_start, bool* converged = nullptr, double tol = 1e-8,
                           int max_outer = 500);

/// Smallest delta that zeroes every penalized coefficient: the max absolute
/// score at the null fit, scaled by the penalty weights.
double glm_delta_max(const Matrix& X, const Vector& pseudo_y, const Vector& A, FamilyKind kind,
                     const PenaltySpec& penalty, const std::vector<char>& penalized_mask);

/// Log-spaced grid from delta_max down to delta_max * 1e-4.
Vector default_delta_grid(double delta_max, int size = 100);

/// Warm-started coordinate-descent path over a descending delta grid.
/// Per-point divergences are recorded on the knot and the path continues.
SolutionPath glm_penalized_path(const Matrix& X, const Vector& pseudo_y, const Vector& A,
                                FamilyKind kind, const PenaltySpec& penalty,
                                const Vector& delta_grid);

}  // namespace klproj
