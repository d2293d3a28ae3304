#include "klproj/solution_path.hpp"

#include <cmath>

namespace klproj {

std::vector<Index> active_set(const Vector& beta, double thresh) {
  std::vector<Index> out;
  for (Index j = 0; j < beta.size(); ++j)
    if (std::abs(beta(j)) > thresh) out.push_back(j);
  return out;
}

double constraint_value(const Vector& beta, const Vector& weights) {
  return (weights.array() * beta.array().abs()).sum();
}

Vector path_at_constraint(const SolutionPath& path, double lambda) {
  if (path.knots.empty()) throw std::invalid_argument("empty solution path");
  const auto& ks = path.knots;
  if (lambda <= ks.front().constraint_value) return ks.front().beta;
  if (lambda >= ks.back().constraint_value) return ks.back().beta;
  for (size_t k = 0; k + 1 < ks.size(); ++k) {
    double c0 = ks[k].constraint_value, c1 = ks[k + 1].constraint_value;
    if (lambda >= c0 && lambda <= c1) {
      if (c1 - c0 <= 1e-300) return ks[k + 1].beta;
      double t = (lambda - c0) / (c1 - c0);
      return (1.0 - t) * ks[k].beta + t * ks[k + 1].beta;
    }
  }
  return ks.back().beta;
}

Vector path_at_delta(const SolutionPath& path, double delta) {
  if (path.knots.empty()) throw std::invalid_argument("empty solution path");
  const auto& ks = path.knots;
  if (delta >= ks.front().delta) return ks.front().beta;
  if (delta <= ks.back().delta) return ks.back().beta;
  for (size_t k = 0; k + 1 < ks.size(); ++k) {
    double d0 = ks[k].delta, d1 = ks[k + 1].delta;
    if (delta <= d0 && delta >= d1) {
      if (d0 - d1 <= 1e-300) return ks[k + 1].beta;
      double t = (d0 - delta) / (d0 - d1);
      return (1.0 - t) * ks[k].beta + t * ks[k + 1].beta;
    }
  }
  return ks.back().beta;
}

}  // namespace klproj
