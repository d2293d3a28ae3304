#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace klproj {

enum class FamilyKind { gaussian, binomial, poisson };

/// Clamps a mean into the family's open mean domain before natural-parameter
/// evaluation; saturated binomial draws would otherwise give infinite logits.
template <typename T>
T clamp_mean(FamilyKind k, T mu) {
  switch (k) {
    case FamilyKind::binomial:
      return std::min(std::max(mu, T(1e-10)), T(1) - T(1e-10));
    case FamilyKind::poisson:
      return std::max(mu, T(1e-10));
    default:
      return mu;
  }
}

/// Cumulant b(theta).
template <typename T>
T cumulant(FamilyKind k, T theta) {
  switch (k) {
    case FamilyKind::gaussian:
      return theta * theta / T(2);
    case FamilyKind::binomial:
      // softplus, stable on both tails
      return theta > T(0) ? theta + std::log1p(std::exp(-theta)) : std::log1p(std::exp(theta));
    case FamilyKind::poisson:
      return std::exp(theta);
  }
  return T(0);
}

/// Mean function b'(theta).
template <typename T>
T mean_from_theta(FamilyKind k, T theta) {
  switch (k) {
    case FamilyKind::gaussian:
      return theta;
    case FamilyKind::binomial:
      return theta >= T(0) ? T(1) / (T(1) + std::exp(-theta))
                           : std::exp(theta) / (T(1) + std::exp(theta));
    case FamilyKind::poisson:
      return std::exp(theta);
  }
  return T(0);
}

/// Variance function b''(theta).
template <typename T>
T variance_from_theta(FamilyKind k, T theta) {
  switch (k) {
    case FamilyKind::gaussian:
      return T(1);
    case FamilyKind::binomial: {
      T m = mean_from_theta(k, theta);
      return m * (T(1) - m);
    }
    case FamilyKind::poisson:
      return std::exp(theta);
  }
  return T(0);
}

/// Canonical link g(mu); inverse of b'.
template <typename T>
T theta_from_mean(FamilyKind k, T mu) {
  mu = clamp_mean(k, mu);
  switch (k) {
    case FamilyKind::gaussian:
      return mu;
    case FamilyKind::binomial:
      return std::log(mu / (T(1) - mu));
    case FamilyKind::poisson:
      return std::log(mu);
  }
  return T(0);
}

struct Family {
  FamilyKind kind = FamilyKind::gaussian;

  bool free_dispersion() const { return kind == FamilyKind::gaussian; }
  const char* name() const {
    switch (kind) {
      case FamilyKind::gaussian: return "gaussian";
      case FamilyKind::binomial: return "binomial";
      case FamilyKind::poisson: return "poisson";
    }
    return "?";
  }
  static Family gaussian() { return {FamilyKind::gaussian}; }
  static Family binomial() { return {FamilyKind::binomial}; }
  static Family poisson() { return {FamilyKind::poisson}; }
  static Family parse(const std::string& s) {
    if (s == "gaussian") return gaussian();
    if (s == "binomial") return binomial();
    if (s == "poisson") return poisson();
    throw std::invalid_argument("unknown family: " + s);
  }
};

}  // namespace klproj
