#pragma once

#include "solution_path.hpp"

namespace klproj {

/// Stationarity audit result; violations name the offending coordinate.
struct KktReport {
  bool pass = true;
  std::vector<std::string> violations;
};

/// Checks the subgradient conditions of the weighted-L1 (optionally ridged)
/// problem at one coefficient vector: active j must have
/// score_j = delta * w_j * sign(b_j) (+ ridge term), inactive j must have
/// |score_j| <= delta * w_j, where score = X' (A o (target - mu(b))).
/// Tolerances are relative to max(1, delta * w_j).
KktReport kkt_check_point(const Matrix& X, const Vector& target_mu, const Vector& A,
                          FamilyKind kind, const PenaltySpec& penalty, double delta,
                          const Vector& beta, double tol = 1e-6);

/// Runs kkt_check_point at every knot of a path.
KktReport kkt_check_path(const SolutionPath& path, const Matrix& X, const Vector& A,
                         const PenaltySpec& penalty, double tol = 1e-6);

}  // namespace klproj
