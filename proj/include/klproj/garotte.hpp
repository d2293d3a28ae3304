#pragma once

#include <string>

#include "family.hpp"
#include "kkt.hpp"
#include "types.hpp"

namespace klproj {

enum class HeredityMode { none, strong, weak };

HeredityMode parse_heredity(const std::string& name);
std::string heredity_name(HeredityMode mode);

/// Parent sets per column: strong heredity demands theta_i <= theta_j for
/// every parent j, weak heredity theta_i <= sum of parent thetas.
struct HeredityGraph {
  HeredityMode mode = HeredityMode::none;
  std::vector<std::vector<Index>> parents;
};

/// Validates parent indices and rejects cyclic parent relations.
HeredityGraph make_heredity_graph(HeredityMode mode, std::vector<std::vector<Index>> parents);

/// Inequality rows H with H theta <= 0 encoding the graph for p columns.
Matrix heredity_rows(const HeredityGraph& graph, Index p);

/// Scaling vector theta applied to a reference coefficient vector.
struct GarotteSolution {
  Vector theta;
  double lambda = 0.0;
  Vector effective_beta;  ///< beta_star with theta applied per coordinate
  std::vector<Index> active;
  bool converged = false;
};

/// Minimizes the discrepancy between target_mu and the mean at X(beta_star o
/// theta) subject to theta >= 0, sum(theta) <= lambda, and heredity rows.
/// Gaussian case is one constrained QP; other families iterate QPs on the
/// working response. theta_warm, when given, seeds the solver.
GarotteSolution garotte_fit(const Matrix& X, const Vector& beta_star, const Vector& target_mu,
                            double lambda, const HeredityGraph& heredity,
                            FamilyKind kind = FamilyKind::gaussian,
                            const Vector* obs_weights = nullptr,
                            const Vector* theta_warm = nullptr);

/// Audits a gaussian garotte solution against the constrained stationarity
/// system: gradient + active-constraint combination vanishes with nonnegative
/// multipliers, and all constraints hold.
KktReport garotte_kkt_check(const Matrix& X, const Vector& beta_star, const Vector& target_mu,
                            const GarotteSolution& sol, const HeredityGraph& heredity,
                            double tol = 1e-6);

}  // namespace klproj
