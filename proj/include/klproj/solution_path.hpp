#pragma once

#include <string>
#include <vector>

#include "family.hpp"
#include "penalty.hpp"
#include "types.hpp"

namespace klproj {

constexpr double kActiveThreshold = 1e-8;

/// One point on a penalized trajectory.
struct PathKnot {
  double delta = 0;            // penalty multiplier
  Vector beta;
  std::vector<Index> active;   // exactly the nonzero coefficients
  double constraint_value = 0; // sum_j w_j |beta_j|
  double objective = 0;
  bool converged = true;
};

/// Penalized coefficient trajectory, knots ordered by strictly decreasing
/// delta.  The first knot is the fully penalized solution.
struct SolutionPath {
  std::vector<PathKnot> knots;
  FamilyKind family = FamilyKind::gaussian;
  Vector target_mu;
  Vector weights;
  bool truncated = false;
  std::string warning;
};

std::vector<Index> active_set(const Vector& beta, double thresh = kActiveThreshold);
double constraint_value(const Vector& beta, const Vector& weights);

/// Coefficients at constraint level lambda, linearly interpolated between the
/// bracketing knots in the constraint coordinate.  Exact for the gaussian
/// homotopy, where beta is piecewise linear in delta between knots.
Vector path_at_constraint(const SolutionPath& path, double lambda);

/// Coefficients at penalty multiplier delta by the same interpolation.
Vector path_at_delta(const SolutionPath& path, double delta);

}  // namespace klproj
