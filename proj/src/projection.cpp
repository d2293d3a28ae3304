#include "klproj/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "klproj/glm_path.hpp"
#include "klproj/lasso_path.hpp"
#include "klproj/parallel.hpp"
#include "klproj/penalty.hpp"

namespace klproj {

SubspaceKind parse_subspace(const std::string& name) {
  if (name == "lasso") return SubspaceKind::lasso;
  if (name == "adaptive" || name == "adaptive_lasso") return SubspaceKind::adaptive_lasso;
  if (name == "elastic_net" || name == "enet") return SubspaceKind::elastic_net;
  if (name == "garotte") return SubspaceKind::garotte;
  throw std::invalid_argument("unknown subspace kind: " + name);
}

std::string subspace_name(SubspaceKind kind) {
  switch (kind) {
    case SubspaceKind::lasso:
      return "lasso";
    case SubspaceKind::adaptive_lasso:
      return "adaptive_lasso";
    case SubspaceKind::elastic_net:
      return "elastic_net";
    case SubspaceKind::garotte:
      return "garotte";
  }
  return "lasso";
}

namespace {

void validate_grid(const Vector& grid) {
  if (grid.size() < 1) throw std::invalid_argument("empty lambda grid");
  if (grid[0] < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  for (Index k = 0; k + 1 < grid.size(); ++k)
    if (!(grid[k] < grid[k + 1]))
      throw std::invalid_argument("lambda grid must be strictly increasing");
}

Vector reference_beta(const ConstraintSpec& spec, const Vector& draw_beta) {
  if (spec.beta_star_from_draw) return draw_beta;
  if (spec.beta_star.size() != draw_beta.size())
    throw std::invalid_argument("beta_star length mismatch");
  return spec.beta_star;
}

PenaltySpec penalty_for(const Dataset& ds, const ConstraintSpec& spec, const Vector& draw_beta) {
  switch (spec.kind) {
    case SubspaceKind::lasso:
      return lasso_penalty(ds.penalized);
    case SubspaceKind::adaptive_lasso:
      return adaptive_penalty(reference_beta(spec, draw_beta), ds.penalized);
    case SubspaceKind::elastic_net:
      return elastic_net_penalty(ds.penalized, spec.gamma_ridge);
    case SubspaceKind::garotte:
      break;
  }
  throw std::logic_error("no L1 penalty for the garotte");
}

/// Constraint value the solver can reach: capped coordinates are pinned at
/// zero on the path, so they do not count toward feasibility.
double feasible_constraint(const PenaltySpec& penalty, const Vector& beta) {
  double total = 0.0;
  for (Index j = 0; j < beta.size(); ++j)
    if (!penalty.excluded(j)) total += penalty.weights[j] * std::abs(beta[j]);
  return total;
}

/// Optimal projected dispersion under observation weights.
double weighted_project_sigma(double phi, const Vector& mu_full, const Vector& mu_sub,
                              const Vector& A) {
  const Vector diff = mu_full - mu_sub;
  return phi + A.cwiseProduct(diff.cwiseAbs2()).sum() / A.sum();
}

struct KlContext {
  const Dataset* ds = nullptr;
  Vector mu_draw;
  double phi_draw = 1.0;
};

/// Divergence from the draw to the model at beta, dispersion projected.
void project_point(const KlContext& ctx, const Vector& beta, double& phi_out, double& kl_out) {
  const Dataset& ds = *ctx.ds;
  const FamilyKind kind = ds.family.kind;
  const Vector mu_sub = mean_from_eta(kind, ds.X * beta);
  if (kind == FamilyKind::gaussian) {
    phi_out = weighted_project_sigma(ctx.phi_draw, ctx.mu_draw, mu_sub, ds.weights);
    kl_out = kl_from_means(kind, ctx.mu_draw, mu_sub, ds.weights, ctx.phi_draw, phi_out);
  } else {
    phi_out = 1.0;
    kl_out = kl_from_means(kind, ctx.mu_draw, mu_sub, ds.weights);
  }
}

/// Gaussian designs fold observation weights and the elastic-net ridge into
/// an augmented least-squares system, keeping the homotopy exact.
void gaussian_system(const Dataset& ds, const Vector& mu_draw, const PenaltySpec& penalty,
                     Matrix& X_out, Vector& t_out) {
  const Index n = ds.n();
  const Index p = ds.p();
  const bool unit = (ds.weights.array() == 1.0).all();
  std::vector<Index> ridged;
  if (penalty.gamma_ridge > 0.0)
    for (Index j = 0; j < p; ++j)
      if (penalty.weights[j] > 0.0 && !penalty.excluded(j)) ridged.push_back(j);
  const Index extra = static_cast<Index>(ridged.size());
  X_out.resize(n + extra, p);
  t_out.resize(n + extra);
  if (unit) {
    X_out.topRows(n) = ds.X;
    t_out.head(n) = mu_draw;
  } else {
    const Vector sw = ds.weights.cwiseSqrt();
    X_out.topRows(n) = sw.asDiagonal() * ds.X;
    t_out.head(n) = sw.cwiseProduct(mu_draw);
  }
  if (extra > 0) {
    X_out.bottomRows(extra).setZero();
    t_out.tail(extra).setZero();
    const double root = std::sqrt(2.0 * penalty.gamma_ridge);
    for (Index r = 0; r < extra; ++r) X_out(n + r, ridged[static_cast<std::size_t>(r)]) = root;
  }
}

}  // namespace

Index ProjectionEnsemble::grid_index(double lambda) const {
  for (Index k = 0; k < lambda_grid.size(); ++k)
    if (std::abs(lambda_grid[k] - lambda) <= 1e-9 * std::max(1.0, std::abs(lambda))) return k;
  throw std::invalid_argument("lambda is not on the ensemble grid");
}

Matrix ProjectionEnsemble::gamma_at(Index g) const {
  const Matrix& b = beta.at(static_cast<std::size_t>(g));
  return (b.array() != 0.0).cast<double>().matrix();
}

Vector ProjectionEnsemble::sizes_at(Index g) const {
  const Matrix& b = beta.at(static_cast<std::size_t>(g));
  Vector out = Vector::Zero(b.rows());
  for (Index i = 0; i < b.rows(); ++i)
    for (Index j = 0; j < b.cols(); ++j)
      if (penalized[static_cast<std::size_t>(j)] != 0 && std::abs(b(i, j)) > kActiveThreshold)
        out[i] += 1.0;
  return out;
}

std::vector<ModelId> ProjectionEnsemble::models_at(Index g) const {
  const Matrix& b = beta.at(static_cast<std::size_t>(g));
  std::vector<ModelId> out;
  out.reserve(static_cast<std::size_t>(b.rows()));
  for (Index i = 0; i < b.rows(); ++i)
    out.push_back(ModelId::from_beta(b.row(i).transpose(), penalized, kActiveThreshold));
  return out;
}

DrawProjection project_draw_on_grid(const Dataset& ds, const ParamPoint& draw,
                                    const ConstraintSpec& spec, const Vector& lambda_grid) {
  const Index p = ds.p();
  const Index g = lambda_grid.size();
  if (draw.beta.size() != p) throw std::invalid_argument("draw length mismatch");
  if (!draw.beta.allFinite()) throw std::invalid_argument("draw has non-finite coefficients");
  if (ds.family.kind == FamilyKind::gaussian && !(draw.phi > 0.0))
    throw std::invalid_argument("gaussian draw needs a positive dispersion");
  validate_grid(lambda_grid);

  KlContext ctx;
  ctx.ds = &ds;
  ctx.mu_draw = mean_response(ds, draw.beta);
  ctx.phi_draw = ds.family.kind == FamilyKind::gaussian ? draw.phi : 1.0;

  DrawProjection out;
  out.beta.resize(static_cast<std::size_t>(g));
  out.phi.assign(static_cast<std::size_t>(g), ctx.phi_draw);
  out.kl.assign(static_cast<std::size_t>(g), 0.0);

  // Most constrained reference: the garotte zeroes everything, the penalized
  // paths keep unpenalized columns refit.
  const Vector beta_null =
      spec.kind == SubspaceKind::garotte ? Vector::Zero(p) : null_fit(ds, ctx.mu_draw);
  double phi_null = ctx.phi_draw;
  project_point(ctx, beta_null, phi_null, out.null_kl);

  if (spec.kind == SubspaceKind::garotte) {
    const Vector ref = reference_beta(spec, draw.beta);
    Vector warm = Vector::Zero(p);
    for (Index k = 0; k < g; ++k) {
      const double lambda = lambda_grid[k];
      if (spec.beta_star_from_draw && lambda >= static_cast<double>(p)) {
        // theta = 1 reproduces the draw exactly and satisfies every row
        out.beta[static_cast<std::size_t>(k)] = draw.beta;
        out.phi[static_cast<std::size_t>(k)] = ctx.phi_draw;
        out.kl[static_cast<std::size_t>(k)] = 0.0;
        warm = Vector::Ones(p);
        continue;
      }
      const GarotteSolution sol = garotte_fit(ds.X, ref, ctx.mu_draw, lambda, spec.heredity,
                                              ds.family.kind, &ds.weights, &warm);
      if (!sol.converged) {
        std::ostringstream msg;
        msg << "garotte solver did not converge at lambda " << lambda;
        throw std::runtime_error(msg.str());
      }
      warm = sol.theta;
      out.beta[static_cast<std::size_t>(k)] = sol.effective_beta;
      project_point(ctx, sol.effective_beta, out.phi[static_cast<std::size_t>(k)],
                    out.kl[static_cast<std::size_t>(k)]);
    }
    return out;
  }

  const PenaltySpec penalty = penalty_for(ds, spec, draw.beta);
  const bool ridge_active = spec.kind == SubspaceKind::elastic_net && spec.gamma_ridge > 0.0;

  Index solve_upto = g;
  if (!ridge_active) {
    // Levels at or above the draw's own constraint value admit the draw.
    const double feasible = feasible_constraint(penalty, draw.beta);
    Vector trimmed = draw.beta;
    bool trimmed_differs = false;
    for (Index j = 0; j < p; ++j)
      if (penalty.excluded(j) && trimmed[j] != 0.0) {
        trimmed[j] = 0.0;
        trimmed_differs = true;
      }
    while (solve_upto > 0 &&
           lambda_grid[solve_upto - 1] >= feasible - 1e-12 * std::max(1.0, feasible))
      --solve_upto;
    for (Index k = solve_upto; k < g; ++k) {
      out.beta[static_cast<std::size_t>(k)] = trimmed;
      if (trimmed_differs)
        project_point(ctx, trimmed, out.phi[static_cast<std::size_t>(k)],
                      out.kl[static_cast<std::size_t>(k)]);
    }
    if (solve_upto == 0) return out;
  }

  SolutionPath path;
  if (ds.family.kind == FamilyKind::gaussian) {
    Matrix Xs;
    Vector ts;
    gaussian_system(ds, ctx.mu_draw, penalty, Xs, ts);
    path = lasso_path_gaussian(Xs, ts, penalty);
  } else {
    const double dmax =
        glm_delta_max(ds.X, ctx.mu_draw, ds.weights, ds.family.kind, penalty, ds.penalized);
    const Vector grid = default_delta_grid(dmax, spec.glm_grid_size);
    path = glm_penalized_path(ds.X, ctx.mu_draw, ds.weights, ds.family.kind, penalty, grid);
  }

  for (Index k = 0; k < solve_upto; ++k) {
    const Vector bk = path_at_constraint(path, lambda_grid[k]);
    out.beta[static_cast<std::size_t>(k)] = bk;
    project_point(ctx, bk, out.phi[static_cast<std::size_t>(k)],
                  out.kl[static_cast<std::size_t>(k)]);
  }
  return out;
}

ProjectedDraw project_draw(const Dataset& ds, const ParamPoint& draw, const ConstraintSpec& spec,
                           double lambda) {
  Vector grid(1);
  grid[0] = lambda;
  const DrawProjection one = project_draw_on_grid(ds, draw, spec, grid);
  ProjectedDraw out;
  out.projected.beta = one.beta[0];
  out.projected.phi = one.phi[0];
  out.kl = one.kl[0];
  out.gamma_prime = (one.beta[0].array() != 0.0).cast<double>().matrix();
  return out;
}

ProjectionEnsemble project_sample(const Dataset& ds, const PosteriorSample& sample,
                                  const ConstraintSpec& spec, const Vector& lambda_grid,
                                  int workers) {
  const Index s = sample.draws.rows();
  const Index p = ds.p();
  if (s < 1) throw std::invalid_argument("empty posterior sample");
  if (sample.draws.cols() != p)
    throw std::invalid_argument("sample width does not match the dataset");
  validate_grid(lambda_grid);
  const Index g = lambda_grid.size();

  struct Slot {
    DrawProjection proj;
    bool ok = false;
    std::string reason;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(s));
  const bool has_phi = sample.phi_draws.size() == s;
  parallel_for(s, workers, [&](Index i) {
    ParamPoint draw;
    draw.beta = sample.draws.row(i).transpose();
    draw.phi = has_phi ? sample.phi_draws[i] : 1.0;
    Slot& slot = slots[static_cast<std::size_t>(i)];
    try {
      slot.proj = project_draw_on_grid(ds, draw, spec, lambda_grid);
      slot.ok = true;
    } catch (const std::exception& e) {
      slot.reason = e.what();
    }
  });

  ProjectionEnsemble ens;
  ens.lambda_grid = lambda_grid;
  ens.family = ds.family.kind;
  ens.penalized = ds.penalized;
  ens.names = ds.names;
  for (Index i = 0; i < s; ++i) {
    if (!slots[static_cast<std::size_t>(i)].ok) {
      ens.excluded_draws.push_back(i);
      ens.exclusion_reasons.push_back(slots[static_cast<std::size_t>(i)].reason);
    }
  }
  const Index excluded = static_cast<Index>(ens.excluded_draws.size());
  if (100 * excluded >= s) {
    std::ostringstream msg;
    msg << "projection failed for " << excluded << " of " << s << " draws (>= 1%)";
    for (std::size_t k = 0; k < ens.exclusion_reasons.size() && k < 3; ++k)
      msg << "; draw " << ens.excluded_draws[k] << ": " << ens.exclusion_reasons[k];
    throw std::runtime_error(msg.str());
  }

  const Index retained = s - excluded;
  ens.beta.assign(static_cast<std::size_t>(g), Matrix::Zero(retained, p));
  ens.phi.assign(static_cast<std::size_t>(g), Vector::Ones(retained));
  ens.kl.resize(retained, g);
  ens.null_kl.resize(retained);
  Index row = 0;
  for (Index i = 0; i < s; ++i) {
    const Slot& slot = slots[static_cast<std::size_t>(i)];
    if (!slot.ok) continue;
    for (Index k = 0; k < g; ++k) {
      ens.beta[static_cast<std::size_t>(k)].row(row) =
          slot.proj.beta[static_cast<std::size_t>(k)].transpose();
      ens.phi[static_cast<std::size_t>(k)][row] = slot.proj.phi[static_cast<std::size_t>(k)];
      ens.kl(row, k) = slot.proj.kl[static_cast<std::size_t>(k)];
    }
    ens.null_kl[row] = slot.proj.null_kl;
    ++row;
  }
  return ens;
}

Vector default_lambda_grid(const Dataset& ds, const PosteriorSample& sample,
                           const ConstraintSpec& spec, int size) {
  if (size < 2) throw std::invalid_argument("lambda grid needs at least 2 points");
  double top = 0.0;
  if (spec.kind == SubspaceKind::garotte) {
    top = static_cast<double>(ds.p());
  } else {
    const Index s = sample.draws.rows();
    if (s < 1) throw std::invalid_argument("empty posterior sample");
    std::vector<double> values(static_cast<std::size_t>(s));
    for (Index i = 0; i < s; ++i) {
      const Vector beta_i = sample.draws.row(i).transpose();
      values[static_cast<std::size_t>(i)] =
          feasible_constraint(penalty_for(ds, spec, beta_i), beta_i);
    }
    std::sort(values.begin(), values.end());
    const Index idx =
        std::min<Index>(s - 1, static_cast<Index>(std::ceil(0.99 * static_cast<double>(s))) - 1);
    top = values[static_cast<std::size_t>(std::max<Index>(idx, 0))];
  }
  if (!(top > 0.0)) top = 1.0;
  Vector grid(size);
  for (int k = 0; k < size; ++k)
    grid[k] = top * static_cast<double>(k) / static_cast<double>(size - 1);
  return grid;
}

double explanatory_loss(const ProjectionEnsemble& ensemble, double lambda) {
  const Index k = ensemble.grid_index(lambda);
  const double num = ensemble.kl.col(k).mean();
  const double den = ensemble.null_kl.mean();
  if (!(den > 0.0))
    throw std::runtime_error("explanatory loss undefined: null and full models coincide");
  return std::min(1.0, std::max(0.0, num / den));
}

double calibrate_lambda(const ProjectionEnsemble& ensemble, CalibrationMode mode, double value) {
  const Index g = ensemble.grid_size();
  if (g < 1) throw std::invalid_argument("empty ensemble grid");
  if (mode == CalibrationMode::loss_bound) {
    if (!(value > 0.0 && value <= 1.0))
      throw std::invalid_argument("loss bound must lie in (0, 1]");
    double min_loss = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < g; ++k) {
      const double loss = explanatory_loss(ensemble, ensemble.lambda_grid[k]);
      min_loss = std::min(min_loss, loss);
      if (loss < value) return ensemble.lambda_grid[k];
    }
    std::ostringstream msg;
    msg << "no grid level meets the loss bound " << value << "; minimum achievable loss is "
        << min_loss;
    throw std::runtime_error(msg.str());
  }
  const double pmax = static_cast<double>(ensemble.penalized.size());
  if (!(value >= 0.0 && value <= pmax))
    throw std::invalid_argument("target size must lie in [0, p]");
  Index best = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < g; ++k) {
    const double gap = std::abs(ensemble.sizes_at(k).mean() - value);
    if (gap < best_gap - 1e-12) {
      best_gap = gap;
      best = k;
    }
  }
  return ensemble.lambda_grid[best];
}

}  // namespace klproj
