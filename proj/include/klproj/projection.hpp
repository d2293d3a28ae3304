#pragma once

#include <string>
#include <vector>

#include "dataset.hpp"
#include "garotte.hpp"
#include "glm.hpp"
#include "model_id.hpp"
#include "posterior.hpp"
#include "solution_path.hpp"

namespace klproj {

enum class SubspaceKind { lasso, adaptive_lasso, elastic_net, garotte };

SubspaceKind parse_subspace(const std::string& name);
std::string subspace_name(SubspaceKind kind);

/// Which constrained family to project onto and how.
struct ConstraintSpec {
  SubspaceKind kind = SubspaceKind::lasso;
  double gamma_ridge = 0.0;        ///< elastic net L2 strength
  HeredityGraph heredity;          ///< garotte only
  bool beta_star_from_draw = true; ///< weight/scale reference is the draw itself
  Vector beta_star;                ///< fixed reference when not from-draw
  int glm_grid_size = 100;         ///< penalty grid size for non-gaussian paths
};

/// One draw's projection at one constraint level.
struct ProjectedDraw {
  ParamPoint projected;
  Vector gamma_prime;  ///< indicator I(beta_j != 0) per coordinate
  double kl = 0.0;
};

/// One draw's projections across a whole constraint grid, plus the
/// most-constrained (null) reference divergence.
struct DrawProjection {
  std::vector<Vector> beta;  ///< per grid point
  std::vector<double> phi;
  std::vector<double> kl;
  double null_kl = 0.0;
};

/// Per-draw, per-level projections of a posterior sample.
struct ProjectionEnsemble {
  Vector lambda_grid;
  std::vector<Matrix> beta;  ///< per grid point: retained draws x p
  std::vector<Vector> phi;   ///< per grid point: retained draws
  Matrix kl;                 ///< retained draws x grid size
  Vector null_kl;            ///< retained draws
  FamilyKind family = FamilyKind::gaussian;
  std::vector<char> penalized;
  std::vector<std::string> names;
  std::vector<Index> excluded_draws;  ///< original indices of dropped draws
  std::vector<std::string> exclusion_reasons;

  Index draws() const { return kl.rows(); }
  Index grid_size() const { return lambda_grid.size(); }
  /// Index of lambda on the grid; throws if absent.
  Index grid_index(double lambda) const;
  /// Sparsity indicators I(beta != 0) at one grid point.
  Matrix gamma_at(Index g) const;
  /// Per-draw count of active penalized coefficients at one grid point.
  Vector sizes_at(Index g) const;
  /// Model identity of each draw's projection at one grid point.
  std::vector<ModelId> models_at(Index g) const;
};

/// KL projection of one draw onto the constrained subspace at one level.
ProjectedDraw project_draw(const Dataset& ds, const ParamPoint& draw, const ConstraintSpec& spec,
                           double lambda);

/// One draw across an ascending constraint grid; solves a single path (or a
/// warm-started QP sweep) and reads it at every level.
DrawProjection project_draw_on_grid(const Dataset& ds, const ParamPoint& draw,
                                    const ConstraintSpec& spec, const Vector& lambda_grid);

/// Projects every draw over the grid, fanning out across workers.  Results
/// are draw-order deterministic.  Draws whose solver fails are excluded and
/// listed; more than 1% exclusions aborts.
ProjectionEnsemble project_sample(const Dataset& ds, const PosteriorSample& sample,
                                  const ConstraintSpec& spec, const Vector& lambda_grid,
                                  int workers = 0);

/// Ascending grid of constraint levels: [0, p] for the garotte, otherwise
/// [0, 99th percentile of the per-draw constraint values].
Vector default_lambda_grid(const Dataset& ds, const PosteriorSample& sample,
                           const ConstraintSpec& spec, int size = 100);

/// Relative loss of explanatory power d(M_S, M_F) at a grid level: the mean
/// per-draw divergence divided by the mean null divergence.
double explanatory_loss(const ProjectionEnsemble& ensemble, double lambda);

enum class CalibrationMode { loss_bound, target_size };

/// loss_bound: smallest grid lambda with loss < value.  target_size: grid
/// lambda whose mean active count is closest to value, ties to the smaller.
double calibrate_lambda(const ProjectionEnsemble& ensemble, CalibrationMode mode, double value);

}  // namespace klproj
