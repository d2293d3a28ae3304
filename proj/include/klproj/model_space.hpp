#pragma once

#include <string>
#include <vector>

#include "model_id.hpp"
#include "projection.hpp"

namespace klproj {

enum class Pooling { at_lambda, along_path };

struct ModelRow {
  ModelId id;
  long count = 0;
  double freq = 0.0;              ///< count / total observations
  double freq_within_size = 0.0;  ///< count / all same-size observations
};

/// Frequency table over distinct sparsity patterns, rows in canonical order:
/// size ascending, then count descending, then lexicographic.
struct ModelTable {
  std::vector<ModelRow> rows;
  long total = 0;
  std::string provenance;
};

/// at_lambda counts each draw's pattern at one level; along_path counts each
/// distinct pattern once per draw across the whole grid.
ModelTable model_frequencies(const ProjectionEnsemble& ensemble, Pooling pooling,
                             double lambda = 0.0);

/// Per-column probability that the projected coefficient is active.
/// Unpenalized columns report 0: they are structural, not model choices, so
/// the sum of this vector equals expected_model_size exactly.
Vector inclusion_probabilities(const ProjectionEnsemble& ensemble, double lambda);

/// Mean count of active penalized coefficients at one level.
double expected_model_size(const ProjectionEnsemble& ensemble, double lambda);

/// Equal-weight mixture over draws of the predictive at each new design row.
struct PredictiveMixture {
  FamilyKind family = FamilyKind::gaussian;
  Matrix component_means;  ///< draws x rows, conditional mean per component
  Vector component_phis;   ///< per-draw dispersion (gaussian), ones otherwise
  Vector mean;             ///< per row
  Vector variance;         ///< per row, law-of-total-variance form

  /// Mixture density (gaussian) or mass (binomial/poisson) at one value.
  double density(Index row, double value) const;
};

PredictiveMixture predictive_mixture(const ProjectionEnsemble& ensemble, double lambda,
                                     const Matrix& new_X);

}  // namespace klproj
