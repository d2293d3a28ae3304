#pragma once

#include <cstdint>
#include <utility>

#include "model_space.hpp"
#include "posterior.hpp"
#include "projection.hpp"

namespace klproj {

enum class Scenario {
  heredity_interaction,   ///< second-order design, garotte with/without heredity
  large_p_example1,       ///< p = 2n, two active blocks, identity covariance
  large_p_example2,       ///< p = 2n, five active, compound-symmetric 0.5
  support_consistency,    ///< growing-n ladder for penalized support recovery
  precondition_contrast,  ///< ensemble projections vs plug-in posterior-mean fit
};

Scenario parse_scenario(const std::string& name);
std::string scenario_name(Scenario scenario);

/// How the penalty multiplier grows with n in the consistency ladder.
enum class PenaltyGrowth { none, fourth_root, linear };

/// Scenario parameters.  Zero/empty numeric fields mean "scenario default";
/// apply_defaults resolves them.
struct SimConfig {
  Scenario scenario = Scenario::heredity_interaction;
  int replicates = 0;
  Index n = 0;
  Index p = 0;
  Vector beta_true;
  double sigma = 0.0;
  double rho = 0.0;  ///< AR(1) predictor correlation (heredity scenario)
  std::uint64_t seed = 0;
  int draws = 0;
  int burn_in = -1;
  Vector lambda_grid;
  PenaltyGrowth growth = PenaltyGrowth::fourth_root;
  std::vector<Index> ladder;  ///< consistency sample sizes
  int workers = 0;
};

/// Fills any unset field with the scenario's bundled configuration.
SimConfig apply_defaults(SimConfig config);

/// Curves over the constraint grid (or the sample-size ladder), averaged over
/// replicates with a permutation-invariant reduction.
struct SimMetrics {
  Vector lambda_grid;
  Vector expected_size;
  Vector loss;
  Vector encompassing;  ///< P(projected active set contains the truth)
  Vector fdr;           ///< pooled: mean wrong selections / mean selections
  std::vector<char> fdr_degenerate;  ///< 1 where the FDR ratio was 0/0
  Matrix inclusion;     ///< grid x p mean inclusion (contrast scenario)
  Vector ladder_n;      ///< consistency ladder
  Vector recovery;      ///< per rung: fraction of replicates whose modal
                        ///< projected pattern is exactly the true support
  Vector recovery_draws;  ///< per rung: raw fraction of draws with exact support
  std::vector<char> replicate_separation;  ///< per replicate: active-group mean
                                           ///< inclusion beats inactive at ~20% loss
};

/// AR(1)-style covariance rho^|i-j|.
Matrix ar1_covariance(Index p, double rho);
/// Unit-diagonal covariance with a constant off-diagonal.
Matrix compound_symmetric(Index p, double off);

/// Second-order design simulation: conjugate gaussian posterior, garotte
/// projections with strong heredity vs unconstrained, averaged metrics.
std::pair<SimMetrics, SimMetrics> run_heredity_sim(const SimConfig& config);

/// p > n study: shrinkage-prior Gibbs posterior, adaptive projections, FDR
/// and loss curves plus the per-replicate inclusion-separation check.
SimMetrics run_large_p_sim(const SimConfig& config);

/// Growing-n ladder: fraction of draws whose penalized projection recovers
/// the true support exactly, per rung.
SimMetrics run_consistency_check(const SimConfig& config);

/// Per-draw ensemble projections vs a single projection of the posterior
/// mean on identical data.
std::pair<SimMetrics, SimMetrics> run_preconditioning_contrast(const SimConfig& config);

}  // namespace klproj
