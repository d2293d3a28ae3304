#include "klproj/garotte.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "klproj/glm.hpp"
#include "klproj/qp.hpp"
#include "klproj/solution_path.hpp"

namespace klproj {

namespace {

enum class Mark : unsigned char { unseen, open, done };

void visit(Index v, const std::vector<std::vector<Index>>& parents, std::vector<Mark>& marks) {
  marks[static_cast<std::size_t>(v)] = Mark::open;
  for (Index u : parents[static_cast<std::size_t>(v)]) {
    const Mark m = marks[static_cast<std::size_t>(u)];
    if (m == Mark::open) throw std::invalid_argument("heredity graph has a cycle");
    if (m == Mark::unseen) visit(u, parents, marks);
  }
  marks[static_cast<std::size_t>(v)] = Mark::done;
}

/// Stacks nonnegativity, budget, and heredity rows into C theta <= d.
void build_constraints(const HeredityGraph& heredity, Index p, double lambda, Matrix& C,
                       Vector& d) {
  const Matrix H = heredity_rows(heredity, p);
  const Index mh = H.rows();
  C.resize(p + 1 + mh, p);
  C.topRows(p) = -Matrix::Identity(p, p);
  C.row(p) = Vector::Ones(p).transpose();
  if (mh > 0) C.bottomRows(mh) = H;
  d = Vector::Zero(p + 1 + mh);
  d[p] = lambda;
}

}  // namespace

HeredityMode parse_heredity(const std::string& name) {
  if (name == "none") return HeredityMode::none;
  if (name == "strong") return HeredityMode::strong;
  if (name == "weak") return HeredityMode::weak;
  throw std::invalid_argument("unknown heredity mode: " + name + " (none, strong, weak)");
}

std::string heredity_name(HeredityMode mode) {
  switch (mode) {
    case HeredityMode::none: return "none";
    case HeredityMode::strong: return "strong";
    case HeredityMode::weak: return "weak";
  }
  return "none";
}

HeredityGraph make_heredity_graph(HeredityMode mode, std::vector<std::vector<Index>> parents) {
  const Index p = static_cast<Index>(parents.size());
  for (Index i = 0; i < p; ++i) {
    for (Index u : parents[static_cast<std::size_t>(i)]) {
      if (u < 0 || u >= p) throw std::invalid_argument("heredity parent index out of range");
      if (u == i) throw std::invalid_argument("heredity graph has a cycle");
    }
  }
  std::vector<Mark> marks(static_cast<std::size_t>(p), Mark::unseen);
  for (Index i = 0; i < p; ++i)
    if (marks[static_cast<std::size_t>(i)] == Mark::unseen) visit(i, parents, marks);
  HeredityGraph graph;
  graph.mode = mode;
  graph.parents = std::move(parents);
  return graph;
}

Matrix heredity_rows(const HeredityGraph& graph, Index p) {
  if (graph.mode == HeredityMode::none || graph.parents.empty()) return Matrix(0, p);
  if (static_cast<Index>(graph.parents.size()) != p)
    throw std::invalid_argument("heredity graph size does not match column count");
  std::vector<Vector> rows;
  for (Index i = 0; i < p; ++i) {
    const std::vector<Index>& par = graph.parents[static_cast<std::size_t>(i)];
    if (par.empty()) continue;
    if (graph.mode == HeredityMode::strong) {
      for (Index j : par) {
        Vector row = Vector::Zero(p);
        row[i] = 1.0;
        row[j] -= 1.0;
        rows.push_back(row);
      }
    } else {
      Vector row = Vector::Zero(p);
      row[i] = 1.0;
      for (Index j : par) row[j] -= 1.0;
      rows.push_back(row);
    }
  }
  Matrix H(static_cast<Index>(rows.size()), p);
  for (std::size_t r = 0; r < rows.size(); ++r) H.row(static_cast<Index>(r)) = rows[r];
  return H;
}

GarotteSolution garotte_fit(const Matrix& X, const Vector& beta_star, const Vector& target_mu,
                            double lambda, const HeredityGraph& heredity, FamilyKind kind,
                            const Vector* obs_weights, const Vector* theta_warm) {
  const Index n = X.rows();
  const Index p = X.cols();
  if (beta_star.size() != p || target_mu.size() != n)
    throw std::invalid_argument("garotte_fit: dimension mismatch");
  if (!(lambda >= 0.0)) throw std::invalid_argument("garotte_fit: lambda must be nonnegative");

  GarotteSolution sol;
  sol.lambda = lambda;
  sol.theta = Vector::Zero(p);
  sol.effective_beta = Vector::Zero(p);
  if (lambda <= 1e-12) {
    sol.converged = true;
    return sol;
  }

  const Vector A = obs_weights ? *obs_weights : Vector::Ones(n);
  const Matrix Z = X * beta_star.asDiagonal();
  Matrix C;
  Vector d;
  build_constraints(heredity, p, lambda, C, d);

  Vector theta = Vector::Zero(p);
  if (theta_warm != nullptr && theta_warm->size() == p) {
    const Vector w = theta_warm->cwiseMax(0.0);
    const Index mh = C.rows() - p - 1;
    bool fits = w.sum() <= lambda + 1e-10;
    if (fits && mh > 0) fits = (C.bottomRows(mh) * w).maxCoeff() <= 1e-10;
    if (fits) theta = w;
  }

  bool ok = false;
  const int max_sqa = kind == FamilyKind::gaussian ? 1 : 100;
  for (int it = 0; it < max_sqa; ++it) {
    Vector w_work;
    Vector z_work;
    if (kind == FamilyKind::gaussian) {
      w_work = A;
      z_work = target_mu;
    } else {
      const Vector eta = Z * theta;
      const Vector mu = mean_from_eta(kind, eta);
      Vector b2(n);
      for (Index i = 0; i < n; ++i)
        b2[i] = std::max(variance_from_theta(kind, eta[i]), 1e-10);
      w_work = A.cwiseProduct(b2);
      z_work = eta + (target_mu - mu).cwiseQuotient(b2);
    }
    Matrix Q = Z.transpose() * w_work.asDiagonal() * Z;
    const double ridge = 1e-12 * std::max(1.0, Q.diagonal().maxCoeff());
    Q.diagonal().array() += ridge;
    const Vector q = Z.transpose() * w_work.cwiseProduct(z_work).matrix();

    const QpResult qp = solve_qp_ineq(Q, q, C, d, theta);
    const double change = (qp.theta - theta).cwiseAbs().maxCoeff();
    theta = qp.theta;
    if (!qp.converged) break;
    if (kind == FamilyKind::gaussian || change < 1e-8) {
      ok = true;
      break;
    }
  }

  sol.theta = theta;
  sol.converged = ok;
  sol.effective_beta = beta_star.cwiseProduct(theta);
  for (Index j = 0; j < p; ++j)
    if (theta[j] > kActiveThreshold) sol.active.push_back(j);
  return sol;
}

KktReport garotte_kkt_check(const Matrix& X, const Vector& beta_star, const Vector& target_mu,
                            const GarotteSolution& sol, const HeredityGraph& heredity,
                            double tol) {
  KktReport report;
  const Index p = X.cols();
  const Matrix Z = X * beta_star.asDiagonal();
  const Vector g = Z.transpose() * (Z * sol.theta - target_mu);
  Matrix C;
  Vector d;
  build_constraints(heredity, p, sol.lambda, C, d);

  const double feas_tol = 1e-8 * std::max(1.0, sol.lambda);
  std::vector<Index> tight;
  for (Index i = 0; i < C.rows(); ++i) {
    const double slack = d[i] - C.row(i).dot(sol.theta);
    if (slack < -feas_tol) {
      report.pass = false;
      report.violations.push_back("constraint " + std::to_string(i) + " violated by " +
                                  std::to_string(-slack));
    }
    if (slack <= feas_tol) tight.push_back(i);
  }

  const double scale = std::max(1.0, (Z.transpose() * target_mu).cwiseAbs().maxCoeff());
  Vector residual = g;
  if (!tight.empty()) {
    // Nonnegative multipliers on tight rows via a small bound-constrained QP.
    const Index mt = static_cast<Index>(tight.size());
    Matrix Ct(mt, p);
    for (Index i = 0; i < mt; ++i) Ct.row(i) = C.row(tight[static_cast<std::size_t>(i)]);
    Matrix Qm = Ct * Ct.transpose();
    Qm.diagonal().array() += 1e-12 * std::max(1.0, Qm.diagonal().maxCoeff());
    const Vector qm = -(Ct * g);
    const Matrix Cm = -Matrix::Identity(mt, mt);
    const Vector dm = Vector::Zero(mt);
    const QpResult nnls = solve_qp_ineq(Qm, qm, Cm, dm, Vector::Zero(mt));
    residual = g + Ct.transpose() * nnls.theta;
  }
  const double gap = residual.cwiseAbs().maxCoeff();
  if (gap > tol * scale) {
    report.pass = false;
    report.violations.push_back("stationarity residual " + std::to_string(gap));
  }
  return report;
}

}  // namespace klproj
