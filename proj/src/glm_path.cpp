#include "klproj/glm_path.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "klproj/glm.hpp"

namespace klproj {

namespace {

double penalized_objective(const Matrix& X, const Vector& pseudo_y, const Vector& A,
                           FamilyKind kind, const PenaltySpec& pen, double delta,
                           const Vector& beta) {
  double obj = -exp_family_loglik(kind, X * beta, pseudo_y, A);
  obj += delta * constraint_value(beta, pen.weights);
  if (pen.gamma_ridge > 0)
    for (Index j = 0; j < beta.size(); ++j)
      if (pen.weights(j) > 0) obj += pen.gamma_ridge * beta(j) * beta(j);
  return obj;
}

}  // namespace

Vector glm_penalized_solve(const Matrix& X, const Vector& pseudo_y, const Vector& A,
                           FamilyKind kind, const PenaltySpec& penalty, double delta,
                           Vector beta, bool* converged, double tol, int max_outer) {
  const Index n = X.rows(), p = X.cols();
  if (beta.size() != p) beta = Vector::Zero(p);
  for (Index j = 0; j < p; ++j)
    if (penalty.excluded(j)) beta(j) = 0.0;

  bool ok = false;
  double prev_obj = std::numeric_limits<double>::infinity();
  int bad_steps = 0;

  Vector eta(n), mu(n), bpp(n), wrk(n), z(n), r(n), wxx(p), aj(p), beta_prev(p);
  for (int outer = 0; outer < max_outer; ++outer) {
    beta_prev = beta;
    eta.noalias() = X * beta;
    for (Index i = 0; i < n; ++i) {
      mu(i) = clamp_mean(kind, mean_from_theta(kind, eta(i)));
      bpp(i) = std::max(variance_from_theta(kind, eta(i)), 1e-10);
      wrk(i) = A(i) * bpp(i);
      z(i) = eta(i) + (pseudo_y(i) - mu(i)) / bpp(i);
    }
    for (Index j = 0; j < p; ++j) {
      wxx(j) = (wrk.array() * X.col(j).array().square()).sum();
      // the ridge only touches penalized coordinates
      aj(j) = wxx(j) + (penalty.weights(j) > 0 ? 2.0 * penalty.gamma_ridge : 0.0);
    }

    r = z - eta;
    for (int inner = 0; inner < 200; ++inner) {
      double inner_chg = 0;
      for (Index j = 0; j < p; ++j) {
        if (penalty.excluded(j)) continue;
        double cj = (wrk.array() * X.col(j).array() * r.array()).sum() + wxx(j) * beta(j);
        double thr = delta * penalty.weights(j);
        double nb;
        if (cj > thr)
          nb = (cj - thr) / aj(j);
        else if (cj < -thr)
          nb = (cj + thr) / aj(j);
        else
          nb = 0.0;
        double ch = nb - beta(j);
        if (ch != 0.0) {
          r -= ch * X.col(j);
          beta(j) = nb;
          inner_chg = std::max(inner_chg, std::abs(ch));
        }
      }
      if (inner_chg < 1e-9) break;
    }

    double obj = penalized_objective(X, pseudo_y, A, kind, penalty, delta, beta);
    if (obj > prev_obj + 1e-12) {
      if (++bad_steps >= 5) {
        ok = false;
        break;
      }
    } else {
      bad_steps = 0;
    }
    prev_obj = obj;
    if ((beta - beta_prev).cwiseAbs().maxCoeff() < tol) {
      ok = true;
      break;
    }
  }
  if (converged) *converged = ok;
  return beta;
}

double glm_delta_max(const Matrix& X, const Vector& pseudo_y, const Vector& A, FamilyKind kind,
                     const PenaltySpec& penalty, const std::vector<char>& penalized_mask) {
  Dataset tmp;  // borrow null_fit's unpenalized handling
  tmp.X = X;
  tmp.y = pseudo_y;
  tmp.family = Family{kind};
  tmp.weights = A;
  tmp.penalized = penalized_mask;
  Vector beta0 = null_fit(tmp, pseudo_y);
  Vector mu0 = mean_from_eta(kind, X * beta0);
  Vector score = X.transpose() * (A.array() * (pseudo_y - mu0).array()).matrix();
  double dmax = 0;
  for (Index j = 0; j < X.cols(); ++j)
    if (penalty.weights(j) > 0 && !penalty.excluded(j))
      dmax = std::max(dmax, std::abs(score(j)) / penalty.weights(j));
  return dmax;
}

Vector default_delta_grid(double delta_max, int size) {
  if (size < 2 || delta_max <= 0) return Vector::Constant(1, std::max(delta_max, 0.0));
  Vector grid(size);
  double lo = std::log(delta_max * 1e-4), hi = std::log(delta_max);
  for (int k = 0; k < size; ++k)
    grid(k) = std::exp(hi + (lo - hi) * static_cast<double>(k) / static_cast<double>(size - 1));
  grid(0) = delta_max;
  return grid;
}

SolutionPath glm_penalized_path(const Matrix& X, const Vector& pseudo_y, const Vector& A,
                                FamilyKind kind, const PenaltySpec& penalty,
                                const Vector& delta_grid) {
  SolutionPath path;
  path.family = kind;
  path.target_mu = pseudo_y;
  path.weights = penalty.weights;

  Vector beta = Vector::Zero(X.cols());
  for (Index k = 0; k < delta_grid.size(); ++k) {
    if (k > 0 && delta_grid(k) >= delta_grid(k - 1))
      throw std::invalid_argument("delta grid must be strictly decreasing");
    bool ok = true;
    beta = glm_penalized_solve(X, pseudo_y, A, kind, penalty, delta_grid(k), beta, &ok);
    PathKnot knot;
    knot.delta = delta_grid(k);
    knot.beta = beta;
    knot.active = active_set(beta);
    knot.constraint_value = constraint_value(beta, penalty.weights);
    knot.objective = penalized_objective(X, pseudo_y, A, kind, penalty, delta_grid(k), beta);
    knot.converged = ok;
    if (!ok && path.warning.empty())
      path.warning = "coordinate descent diverged at delta=" + std::to_string(delta_grid(k));
    path.knots.push_back(std::move(knot));
  }
  return path;
}

}  // namespace klproj
