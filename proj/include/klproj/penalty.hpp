#pragma once

#include <cmath>
#include <vector>

#include "types.hpp"

namespace klproj {

/// L1-style penalty description shared by all path solvers.  Weight 0 marks
/// an unpenalized column (the intercept); weights at or above weight_cap mark
/// coefficients treated as always excluded for the draw that produced them.
struct PenaltySpec {
  enum class Kind { lasso, adaptive_lasso, elastic_net };
  Kind kind = Kind::lasso;
  Vector weights;
  double gamma_ridge = 0.0;  // elastic net only

  static constexpr double weight_cap = 1e8;
  bool excluded(Index j) const { return weights(j) >= weight_cap; }
};

inline PenaltySpec lasso_penalty(const std::vector<char>& penalized) {
  PenaltySpec s;
  s.kind = PenaltySpec::Kind::lasso;
  s.weights = Vector::Zero(static_cast<Index>(penalized.size()));
  for (size_t j = 0; j < penalized.size(); ++j)
    if (penalized[j]) s.weights(static_cast<Index>(j)) = 1.0;
  return s;
}

/// Adaptive weights w_j = min(1 / |beta*_j|, cap) on penalized columns.
inline PenaltySpec adaptive_penalty(const Vector& beta_star, const std::vector<char>& penalized) {
  PenaltySpec s;
  s.kind = PenaltySpec::Kind::adaptive_lasso;
  s.weights = Vector::Zero(beta_star.size());
  for (Index j = 0; j < beta_star.size(); ++j)
    if (penalized[static_cast<size_t>(j)])
      s.weights(j) = std::min(1.0 / std::abs(beta_star(j)), PenaltySpec::weight_cap);
  return s;
}

/// Unweighted L1 plus a fixed ridge coefficient.
inline PenaltySpec elastic_net_penalty(const std::vector<char>& penalized, double gamma_ridge) {
  PenaltySpec s = lasso_penalty(penalized);
  s.kind = PenaltySpec::Kind::elastic_net;
  s.gamma_ridge = gamma_ridge;
  return s;
}

}  // namespace klproj
