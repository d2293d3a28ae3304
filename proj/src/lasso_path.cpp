#include "klproj/lasso_path.hpp"

#include <algorithm>
#include <cmath>

namespace klproj {

namespace {

struct ActiveState {
  std::vector<Index> idx;   // active columns, insertion ordered
  std::vector<double> sgn;  // matching subgradient signs; 0 for unpenalized
  std::vector<char> in;     // membership mask

  explicit ActiveState(Index p) : in(static_cast<size_t>(p), 0) {}
  void add(Index j, double s) {
    idx.push_back(j);
    sgn.push_back(s);
    in[static_cast<size_t>(j)] = 1;
  }
  void remove(Index j) {
    for (size_t k = 0; k < idx.size(); ++k)
      if (idx[k] == j) {
        idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(k));
        sgn.erase(sgn.begin() + static_cast<std::ptrdiff_t>(k));
        break;
      }
    in[static_cast<size_t>(j)] = 0;
  }
};

// beta restricted to the active set at penalty delta:
//   G_A b_A = X_A' target - delta (w o s)_A.
// Returns false when the active gram is numerically singular.
bool solve_active(const Matrix& X, const Vector& target, const Vector& w, const ActiveState& act,
                  double delta, Vector* beta_out) {
  Index m = static_cast<Index>(act.idx.size());
  beta_out->setZero();
  if (m == 0) return true;
  Matrix Xa(X.rows(), m);
  Vector ws(m);
  for (Index k = 0; k < m; ++k) {
    Xa.col(k) = X.col(act.idx[static_cast<size_t>(k)]);
    ws(k) = w(act.idx[static_cast<size_t>(k)]) * act.sgn[static_cast<size_t>(k)];
  }
  Matrix G = Xa.transpose() * Xa;
  Vector rhs = Xa.transpose() * target - delta * ws;
  Eigen::LDLT<Matrix> ldlt(G);
  Vector b = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success || !b.allFinite()) return false;
  if ((G * b - rhs).cwiseAbs().maxCoeff() > 1e-6 * std::max(1.0, rhs.cwiseAbs().maxCoeff()))
    return false;
  for (Index k = 0; k < m; ++k) (*beta_out)(act.idx[static_cast<size_t>(k)]) = b(k);
  return true;
}

// slope d = G_A^{-1} (w o s)_A, so that b_A(delta - t) = b_A(delta) + t d.
bool solve_direction(const Matrix& X, const Vector& w, const ActiveState& act, Vector* dir_out) {
  Index m = static_cast<Index>(act.idx.size());
  dir_out->setZero();
  if (m == 0) return true;
  Matrix Xa(X.rows(), m);
  Vector ws(m);
  for (Index k = 0; k < m; ++k) {
    Xa.col(k) = X.col(act.idx[static_cast<size_t>(k)]);
    ws(k) = w(act.idx[static_cast<size_t>(k)]) * act.sgn[static_cast<size_t>(k)];
  }
  Matrix G = Xa.transpose() * Xa;
  Eigen::LDLT<Matrix> ldlt(G);
  Vector d = ldlt.solve(ws);
  if (ldlt.info() != Eigen::Success || !d.allFinite()) return false;
  if ((G * d - ws).cwiseAbs().maxCoeff() > 1e-6 * std::max(1.0, ws.cwiseAbs().maxCoeff()))
    return false;
  for (Index k = 0; k < m; ++k) (*dir_out)(act.idx[static_cast<size_t>(k)]) = d(k);
  return true;
}

void push_knot(SolutionPath* path, const Matrix& X, const Vector& target, const Vector& w,
               double delta, const Vector& beta) {
  PathKnot knot;
  knot.delta = delta;
  knot.beta = beta;
  knot.active = active_set(beta);
  knot.constraint_value = constraint_value(beta, w);
  knot.objective = 0.5 * (target - X * beta).squaredNorm() + delta * knot.constraint_value;
  path->knots.push_back(std::move(knot));
}

}  // namespace

SolutionPath lasso_path_gaussian(const Matrix& X, const Vector& target_mu,
                                 const PenaltySpec& penalty) {
  const Index p = X.cols();
  const Vector& w = penalty.weights;
  if (w.size() != p) throw std::invalid_argument("penalty weight length does not match design");
  if (!w.allFinite() || (w.array() < 0).any())
    throw std::invalid_argument("penalty weights must be finite and nonnegative");

  SolutionPath path;
  path.family = FamilyKind::gaussian;
  path.target_mu = target_mu;
  path.weights = w;

  ActiveState act(p);
  for (Index j = 0; j < p; ++j)
    if (w(j) == 0.0) act.add(j, 0.0);

  Vector beta(p);
  if (!solve_active(X, target_mu, w, act, 0.0, &beta)) {
    path.truncated = true;
    path.warning = "rank-deficient unpenalized block";
    beta.setZero();
    push_knot(&path, X, target_mu, w, 0.0, beta);
    return path;
  }

  Vector resid = target_mu - X * beta;
  Vector corr = X.transpose() * resid;

  double delta = 0.0;
  for (Index j = 0; j < p; ++j)
    if (w(j) > 0.0 && !penalty.excluded(j)) delta = std::max(delta, std::abs(corr(j)) / w(j));

  push_knot(&path, X, target_mu, w, delta, beta);
  if (delta <= 0.0) return path;

  const double event_eps = 1e-12 * std::max(1.0, delta);
  const double kkt_eps = 1e-9 * std::max(1.0, corr.cwiseAbs().maxCoeff());
  const size_t max_knots = static_cast<size_t>(50 * p + 200);
  int stalls = 0;

  // bring in every variable sitting on the boundary
  for (Index j = 0; j < p; ++j)
    if (!act.in[static_cast<size_t>(j)] && w(j) > 0.0 && !penalty.excluded(j) &&
        std::abs(corr(j)) >= delta * w(j) - kkt_eps)
      act.add(j, corr(j) > 0 ? 1.0 : -1.0);

  while (delta > 0.0 && path.knots.size() < max_knots) {
    Vector dir(p);
    if (!solve_direction(X, w, act, &dir)) {
      path.truncated = true;
      path.warning = "rank-deficient active submatrix at delta=" + std::to_string(delta);
      break;
    }
    Vector g = X.transpose() * (X * dir);

    // nearest event as delta decreases by t
    double best_t = delta;  // default: ride the segment down to delta = 0
    Index event_j = -1;
    bool event_join = false;
    double event_sign = 0;

    for (Index j = 0; j < p; ++j) {
      if (act.in[static_cast<size_t>(j)]) continue;
      if (w(j) <= 0.0 || penalty.excluded(j)) continue;
      double denom_hi = g(j) - w(j);
      if (std::abs(denom_hi) > 1e-300) {
        double t = (corr(j) - delta * w(j)) / denom_hi;
        if (t > event_eps && t < best_t) {
          best_t = t;
          event_j = j;
          event_join = true;
          event_sign = 1.0;
        }
      }
      double denom_lo = g(j) + w(j);
      if (std::abs(denom_lo) > 1e-300) {
        double t = (corr(j) + delta * w(j)) / denom_lo;
        if (t > event_eps && t < best_t) {
          best_t = t;
          event_j = j;
          event_join = true;
          event_sign = -1.0;
        }
      }
    }
    for (size_t k = 0; k < act.idx.size(); ++k) {
      Index j = act.idx[k];
      if (act.sgn[k] == 0.0) continue;
      if (std::abs(dir(j)) > 1e-300) {
        double t = -beta(j) / dir(j);
        if (t > event_eps && t < best_t) {
          best_t = t;
          event_j = j;
          event_join = false;
        }
      }
    }

    double new_delta = std::max(delta - best_t, 0.0);
    if (event_j >= 0 && best_t <= event_eps * 2) {
      if (++stalls > 20) {
        path.truncated = true;
        path.warning = "stalled homotopy at delta=" + std::to_string(delta);
        break;
      }
    } else {
      stalls = 0;
    }

    if (event_j >= 0 && new_delta > 0.0) {
      if (event_join)
        act.add(event_j, event_sign);
      else
        act.remove(event_j);
    } else {
      event_j = -1;  // final segment
    }

    delta = event_j >= 0 ? new_delta : 0.0;
    if (!solve_active(X, target_mu, w, act, delta, &beta)) {
      path.truncated = true;
      path.warning = "rank-deficient active submatrix at delta=" + std::to_string(delta);
      break;
    }
    resid = target_mu - X * beta;
    corr = X.transpose() * resid;

    // sweep in anything pushed over the boundary (ties, simultaneous events)
    for (Index j = 0; j < p; ++j)
      if (!act.in[static_cast<size_t>(j)] && w(j) > 0.0 && !penalty.excluded(j) &&
          std::abs(corr(j)) > delta * w(j) + kkt_eps)
        act.add(j, corr(j) > 0 ? 1.0 : -1.0);

    push_knot(&path, X, target_mu, w, delta, beta);
    if (event_j < 0) break;
  }

  if (path.knots.size() >= max_knots) {
    path.truncated = true;
    path.warning = "knot budget exhausted";
  }
  return path;
}

}  // namespace klproj
