#include "klproj/qp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace klproj {

namespace {

bool rows_independent(const Matrix& C, const std::vector<Index>& rows) {
  if (rows.empty()) return true;
  Matrix W(static_cast<Index>(rows.size()), C.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) W.row(static_cast<Index>(i)) = C.row(rows[i]);
  Eigen::FullPivLU<Matrix> lu(W);
  return lu.rank() == static_cast<Index>(rows.size());
}

}  // namespace

QpResult solve_qp_ineq(const Matrix& Q, const Vector& q, const Matrix& C, const Vector& d,
                       const Vector& theta0, int max_iter, double tol) {
  const Index p = Q.rows();
  const Index m = C.rows();
  if (Q.cols() != p || q.size() != p || theta0.size() != p || (m > 0 && C.cols() != p) ||
      d.size() != m)
    throw std::invalid_argument("solve_qp_ineq: dimension mismatch");

  QpResult res;
  res.theta = theta0;

  const double feas_tol = 100.0 * tol + 1e-12;
  if (m > 0) {
    const Vector slack = d - C * res.theta;
    if (slack.minCoeff() < -feas_tol)
      throw std::invalid_argument("solve_qp_ineq: infeasible start");
  }

  // Seed the working set with an independent subset of the tight constraints.
  std::vector<Index> work;
  for (Index i = 0; i < m; ++i) {
    if (d[i] - C.row(i).dot(res.theta) <= feas_tol) {
      work.push_back(i);
      if (!rows_independent(C, work)) work.pop_back();
    }
  }

  Vector mult;
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;
    const Index mw = static_cast<Index>(work.size());
    const Vector g = Q * res.theta - q;

    // [Q Cw'; Cw 0] [step; mult] = [-g; 0]
    Matrix kkt = Matrix::Zero(p + mw, p + mw);
    kkt.topLeftCorner(p, p) = Q;
    for (Index i = 0; i < mw; ++i) {
      kkt.block(p + i, 0, 1, p) = C.row(work[static_cast<std::size_t>(i)]);
      kkt.block(0, p + i, p, 1) = C.row(work[static_cast<std::size_t>(i)]).transpose();
    }
    Vector rhs = Vector::Zero(p + mw);
    rhs.head(p) = -g;
    const Vector sol = Eigen::FullPivLU<Matrix>(kkt).solve(rhs);
    const Vector step = sol.head(p);
    mult = sol.tail(mw);

    const double step_norm = step.cwiseAbs().maxCoeff();
    if (step_norm <= tol * std::max(1.0, res.theta.cwiseAbs().maxCoeff())) {
      Index worst = -1;
      double worst_val = -tol;
      for (Index i = 0; i < mw; ++i) {
        if (mult[i] < worst_val) {
          worst_val = mult[i];
          worst = i;
        }
      }
      if (worst < 0) {
        res.converged = true;
        break;
      }
      work.erase(work.begin() + worst);
      continue;
    }

    // Longest feasible move along the step direction.
    double alpha = 1.0;
    Index blocker = -1;
    for (Index i = 0; i < m; ++i) {
      if (std::find(work.begin(), work.end(), i) != work.end()) continue;
      const double along = C.row(i).dot(step);
      if (along <= tol) continue;
      const double room = std::max(0.0, d[i] - C.row(i).dot(res.theta));
      const double ai = room / along;
      if (ai < alpha - 1e-14) {
        alpha = ai;
        blocker = i;
      }
    }
    res.theta += alpha * step;
    if (blocker >= 0) {
      work.push_back(blocker);
      if (!rows_independent(C, work)) work.pop_back();
    }
  }

  res.active = work;
  const Index mw = static_cast<Index>(work.size());
  res.multipliers = Vector::Zero(mw);
  if (res.converged && mult.size() == mw) res.multipliers = mult;
  return res;
}

}  // namespace klproj
