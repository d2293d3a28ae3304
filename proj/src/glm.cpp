#include "klproj/glm.hpp"

#include <cmath>

namespace klproj {

Vector mean_from_eta(FamilyKind k, const Vector& eta) {
  Vector mu(eta.size());
  for (Index i = 0; i < eta.size(); ++i) {
    double m = mean_from_theta(k, eta(i));
    if (!std::isfinite(m)) throw std::domain_error("inverse link overflow at observation " + std::to_string(i));
    mu(i) = clamp_mean(k, m);
  }
  return mu;
}

Vector mean_response(const Dataset& ds, const Vector& beta) {
  if (beta.size() != ds.p()) throw std::invalid_argument("coefficient length does not match design");
  return mean_from_eta(ds.family.kind, ds.X * beta);
}

double exp_family_loglik(FamilyKind k, const Vector& eta, const Vector& y, const Vector& A,
                         double phi) {
  double ll = 0;
  for (Index i = 0; i < eta.size(); ++i)
    ll += A(i) * (y(i) * eta(i) - cumulant(k, eta(i)));
  return ll / phi;
}

double kl_from_means(FamilyKind k, const Vector& mu_full, const Vector& mu_sub, const Vector& A,
                     double phi_full, double phi_sub) {
  if (mu_full.size() != mu_sub.size()) throw std::invalid_argument("mean vectors differ in length");
  double kl = 0;
  if (k == FamilyKind::gaussian) {
    double n_eff = A.sum();
    double quad = (A.array() * (mu_full - mu_sub).array().square()).sum();
    kl = 0.5 * n_eff * (std::log(phi_sub / phi_full) + phi_full / phi_sub - 1.0) +
         quad / (2.0 * phi_sub);
  } else {
    for (Index i = 0; i < mu_full.size(); ++i) {
      double mf = clamp_mean(k, mu_full(i));
      double ms = clamp_mean(k, mu_sub(i));
      double tf = theta_from_mean(k, mf);
      double ts = theta_from_mean(k, ms);
      kl += A(i) * (mf * (tf - ts) - cumulant(k, tf) + cumulant(k, ts));
    }
  }
  return kl;
}

double kl_divergence(const Dataset& ds, const ParamPoint& full, const ParamPoint& sub) {
  Vector mu_f = mean_response(ds, full.beta);
  Vector mu_s = mean_response(ds, sub.beta);
  if (full.phi <= 0 || sub.phi <= 0) throw std::invalid_argument("dispersion must be positive");
  return kl_from_means(ds.family.kind, mu_f, mu_s, ds.weights, full.phi, sub.phi);
}

double project_sigma(double sigma2, const Vector& mu_full, const Vector& mu_sub) {
  Index n = mu_full.size();
  if (n == 0) throw std::invalid_argument("empty mean vectors");
  if (mu_sub.size() != n) throw std::invalid_argument("mean vectors differ in length");
  if (sigma2 <= 0) throw std::invalid_argument("sigma2 must be positive");
  return sigma2 + (mu_full - mu_sub).squaredNorm() / static_cast<double>(n);
}

Vector irls_fit(const Matrix& X, const Vector& y, const Vector& A, FamilyKind k,
                const Matrix* prior_precision, const Vector* prior_mean, int max_iter, double tol) {
  Index p = X.cols();
  Vector beta = Vector::Zero(p);

  auto objective = [&](const Vector& b) {
    double v = -exp_family_loglik(k, X * b, y, A);
    if (prior_precision) {
      Vector d = prior_mean ? Vector(b - *prior_mean) : b;
      v += 0.5 * d.dot(*prior_precision * d);
    }
    return v;
  };

  double obj = objective(beta);
  for (int it = 0; it < max_iter; ++it) {
    Vector eta = X * beta;
    Vector mu(eta.size()), w(eta.size());
    for (Index i = 0; i < eta.size(); ++i) {
      mu(i) = clamp_mean(k, mean_from_theta(k, eta(i)));
      w(i) = std::max(A(i) * variance_from_theta(k, eta(i)), 1e-10);
    }
    Vector grad = X.transpose() * (A.array() * (y - mu).array()).matrix();
    Matrix H = X.transpose() * w.asDiagonal() * X;
    if (prior_precision) {
      Vector d = prior_mean ? Vector(beta - *prior_mean) : beta;
      grad -= *prior_precision * d;
      H += *prior_precision;
    }
    Eigen::LDLT<Matrix> ldlt(H);
    if (ldlt.info() != Eigen::Success)
      throw SingularityError("singular information matrix in GLM fit");
    Vector step = ldlt.solve(grad);

    double t = 1.0;
    Vector cand;
    double cand_obj = 0;
    for (int h = 0; h < 40; ++h) {
      cand = beta + t * step;
      cand_obj = objective(cand);
      if (std::isfinite(cand_obj) && cand_obj <= obj + 1e-12) break;
      t *= 0.5;
    }
    double chg = (cand - beta).cwiseAbs().maxCoeff();
    beta = cand;
    obj = cand_obj;
    if (chg < tol) break;
  }
  return beta;
}

Vector null_fit(const Dataset& ds, const Vector& pseudo_y) {
  Vector beta = Vector::Zero(ds.p());
  std::vector<Index> unpen;
  for (Index j = 0; j < ds.p(); ++j)
    if (!ds.penalized[static_cast<size_t>(j)]) unpen.push_back(j);
  if (unpen.empty()) return beta;
  Matrix Xu(ds.n(), static_cast<Index>(unpen.size()));
  for (size_t j = 0; j < unpen.size(); ++j) Xu.col(static_cast<Index>(j)) = ds.X.col(unpen[j]);
  Vector bu = irls_fit(Xu, pseudo_y, ds.weights, ds.family.kind);
  for (size_t j = 0; j < unpen.size(); ++j) beta(unpen[j]) = bu(static_cast<Index>(j));
  return beta;
}

}  // namespace klproj
