#pragma once

#include <cstdint>

#include "dataset.hpp"

namespace klproj {

enum class PriorKind { gaussian_noninformative, logistic_normal, bayesian_lasso };

/// Prior regimes for the encompassing model.  For logistic_normal a full
/// covariance V may be supplied; otherwise v * I is used.
struct PriorSpec {
  PriorKind kind = PriorKind::gaussian_noninformative;
  Vector m;           ///< normal prior mean, zeros when empty
  Matrix V;           ///< normal prior covariance, v * I when empty
  double v = 3.0;     ///< isotropic prior variance fallback
  double lambda_bl = 10.0;
  double ig_shape = 0.01;
  double ig_rate = 0.01;

  Vector prior_mean(Index p) const;
  Matrix prior_covariance(Index p) const;
};

struct SamplerDiagnostics {
  double acceptance = 1.0;
  std::uint64_t seed = 0;
  int burn_in = 0;
  int thin = 1;
  int underflow_count = 0;  ///< latent-scale floors applied (bayesian lasso)
};

/// Ordered posterior draws of the encompassing model's coefficients.
struct PosteriorSample {
  Matrix draws;      ///< s x p, one row per retained draw
  Vector phi_draws;  ///< s dispersion draws, all ones for binomial
  SamplerDiagnostics diagnostics;
};

/// Exact conjugate draws under p(beta, sigma^2) proportional to 1/sigma^2:
/// sigma^2 from the scaled inverse-chi-square with n - p degrees of freedom,
/// beta | sigma^2 normal around the least-squares fit.
PosteriorSample sample_gaussian_noninformative(const Dataset& ds, int n_draws,
                                               std::uint64_t seed);

/// Random-walk Metropolis for the normal-prior logistic posterior.  The
/// proposal covariance is the inverse curvature at the posterior mode, with a
/// scale adapted during burn-in toward acceptance in [0.2, 0.5].
PosteriorSample sample_logistic_normal(const Dataset& ds, const PriorSpec& prior, int burn_in,
                                       int n_draws, std::uint64_t seed, int thin = 1);

/// Gibbs sampler for the double-exponential shrinkage prior
/// p(beta_j | sigma^2) = (lambda / (2 sqrt(sigma^2))) exp(-lambda |beta_j| /
/// sqrt(sigma^2)) with an inverse-gamma sigma^2 prior.  y and X are centered
/// internally, absorbing a flat intercept; the dataset must not carry an
/// unpenalized column.  Handles p > n.
PosteriorSample sample_bayesian_lasso(const Dataset& ds, const PriorSpec& prior, int burn_in,
                                      int n_draws, std::uint64_t seed, int thin = 1);

}  // namespace klproj
