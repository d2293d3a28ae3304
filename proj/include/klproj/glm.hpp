#pragma once

#include "dataset.hpp"

namespace klproj {

/// One point in the encompassing model's parameter space.  phi is sigma^2 for
/// gaussian and fixed at 1 for binomial/poisson.
struct ParamPoint {
  Vector beta;
  double phi = 1.0;
};

/// Inverse-link applied to a linear predictor, clamped into the mean domain.
/// Throws std::domain_error if the inverse link overflows.
Vector mean_from_eta(FamilyKind k, const Vector& eta);

/// mu_i = g^{-1}(x_i' beta).
Vector mean_response(const Dataset& ds, const Vector& beta);

/// Exponential-family log-likelihood sum A_i (y_i theta_i - b(theta_i)) / phi,
/// dropping the c(y, phi) carrier term.  Accepts non-integer pseudo-responses.
double exp_family_loglik(FamilyKind k, const Vector& eta, const Vector& y, const Vector& A,
                         double phi = 1.0);

/// KL divergence between two mean vectors of the same family.  For gaussian
/// this is the closed form including the variance terms; for binomial/poisson
/// phi is 1 and the dispersion arguments are ignored.
double kl_from_means(FamilyKind k, const Vector& mu_full, const Vector& mu_sub, const Vector& A,
                     double phi_full = 1.0, double phi_sub = 1.0);

/// KL divergence between two parameter points of one dataset's model.
double kl_divergence(const Dataset& ds, const ParamPoint& full, const ParamPoint& sub);

/// Optimal sub-model variance sigma^2 + ||mu_full - mu_sub||^2 / n.  With this
/// value the gaussian KL collapses to (n/2) log(sigma_sub^2 / sigma^2).
double project_sigma(double sigma2, const Vector& mu_full, const Vector& mu_sub);

/// Damped-Newton (IRLS) fit of an unpenalized GLM, optionally with a gaussian
/// prior (precision P, mean m) folded in, which makes it a posterior mode.
Vector irls_fit(const Matrix& X, const Vector& y, const Vector& A, FamilyKind k,
                const Matrix* prior_precision = nullptr, const Vector* prior_mean = nullptr,
                int max_iter = 100, double tol = 1e-10);

/// Most-constrained fit: every penalized coefficient pinned at zero,
/// unpenalized columns (the intercept) refit against pseudo_y.
Vector null_fit(const Dataset& ds, const Vector& pseudo_y);

}  // namespace klproj
