#include "klproj/kkt.hpp"

#include <cmath>
#include <sstream>

#include "klproj/glm.hpp"

namespace klproj {

namespace {

void add_violation(KktReport& report, Index j, const std::string& what, double value,
                   double bound) {
  std::ostringstream msg;
  msg << "coordinate " << j << ": " << what << " (" << value << " vs bound " << bound << ")";
  report.pass = false;
  report.violations.push_back(msg.str());
}

}  // namespace

KktReport kkt_check_point(const Matrix& X, const Vector& target_mu, const Vector& A,
                          FamilyKind kind, const PenaltySpec& penalty, double delta,
                          const Vector& beta, double tol) {
  KktReport report;
  const Vector eta = X * beta;
  const Vector mu = mean_from_eta(kind, eta);
  Vector score = X.transpose() * (A.cwiseProduct(target_mu - mu)).matrix();
  if (penalty.gamma_ridge > 0.0) score -= 2.0 * penalty.gamma_ridge * beta;

  for (Index j = 0; j < beta.size(); ++j) {
    if (penalty.excluded(j)) {
      if (beta[j] != 0.0) add_violation(report, j, "excluded coordinate nonzero", beta[j], 0.0);
      continue;
    }
    const double wj = penalty.weights[j];
    const double bound = delta * wj;
    const double scale = tol * std::max(1.0, bound);
    if (std::abs(beta[j]) > kActiveThreshold) {
      const double target = bound * (beta[j] > 0.0 ? 1.0 : -1.0);
      const double gap = std::abs(score[j] - target);
      if (gap > scale) add_violation(report, j, "active stationarity gap", gap, scale);
    } else {
      const double excess = std::abs(score[j]) - bound;
      if (excess > scale) add_violation(report, j, "inactive score above bound", excess, scale);
    }
  }
  return report;
}

KktReport kkt_check_path(const SolutionPath& path, const Matrix& X, const Vector& A,
                         const PenaltySpec& penalty, double tol) {
  KktReport report;
  for (std::size_t k = 0; k < path.knots.size(); ++k) {
    const PathKnot& knot = path.knots[k];
    if (!knot.converged) continue;
    KktReport one =
        kkt_check_point(X, path.target_mu, A, path.family, penalty, knot.delta, knot.beta, tol);
    if (!one.pass) {
      report.pass = false;
      for (const std::string& v : one.violations)
        report.violations.push_back("knot " + std::to_string(k) + ", " + v);
    }
  }
  return report;
}

}  // namespace klproj
