#include "klproj/posterior.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "klproj/glm.hpp"
#include "klproj/rng.hpp"

namespace klproj {

Vector PriorSpec::prior_mean(Index p) const {
  if (m.size() == 0) return Vector::Zero(p);
  if (m.size() != p) throw std::invalid_argument("prior mean length mismatch");
  return m;
}

Matrix PriorSpec::prior_covariance(Index p) const {
  if (V.size() == 0) {
    if (!(v > 0.0)) throw std::invalid_argument("prior variance must be positive");
    return v * Matrix::Identity(p, p);
  }
  if (V.rows() != p || V.cols() != p) throw std::invalid_argument("prior covariance shape mismatch");
  return V;
}

namespace {

void check_draw_counts(int burn_in, int n_draws) {
  if (n_draws < 1) throw std::invalid_argument("n_draws must be at least 1");
  if (burn_in < 0) throw std::invalid_argument("burn_in must be nonnegative");
}

}  // namespace

PosteriorSample sample_gaussian_noninformative(const Dataset& ds, int n_draws,
                                               std::uint64_t seed) {
  if (ds.family.kind != FamilyKind::gaussian)
    throw std::invalid_argument("conjugate sampler requires the gaussian family");
  check_draw_counts(0, n_draws);
  const Index n = ds.n();
  const Index p = ds.p();
  if (n <= p) throw std::invalid_argument("conjugate sampler requires n > p");

  const Vector sw = ds.weights.cwiseSqrt();
  const Matrix Xw = sw.asDiagonal() * ds.X;
  const Vector yw = sw.cwiseProduct(ds.y);

  Eigen::ColPivHouseholderQR<Matrix> qr(Xw);
  if (qr.rank() < p) {
    std::ostringstream msg;
    msg << "design is rank deficient; offending columns:";
    const auto perm = qr.colsPermutation().indices();
    for (Index k = qr.rank(); k < p; ++k) {
      const Index j = perm[k];
      msg << ' ' << (j < static_cast<Index>(ds.names.size()) ? ds.names[static_cast<std::size_t>(j)]
                                                             : std::to_string(j));
    }
    throw SingularityError(msg.str());
  }
  const Vector beta_hat = qr.solve(yw);
  const double rss = (yw - Xw * beta_hat).squaredNorm();

  const Matrix gram = Xw.transpose() * Xw;
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) throw SingularityError("gram matrix not positive definite");
  const Matrix L = llt.matrixL();

  std::mt19937_64 eng = make_engine(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::chi_squared_distribution<double> chisq(static_cast<double>(n - p));

  PosteriorSample out;
  out.draws.resize(n_draws, p);
  out.phi_draws.resize(n_draws);
  out.diagnostics.seed = seed;
  for (int s = 0; s < n_draws; ++s) {
    const double sigma2 = rss / chisq(eng);
    Vector z(p);
    for (Index j = 0; j < p; ++j) z[j] = gauss(eng);
    // cov(L^{-T} z) = (L L')^{-1} = (X'X)^{-1}
    const Vector delta = L.transpose().triangularView<Eigen::Upper>().solve(z);
    out.draws.row(s) = (beta_hat + std::sqrt(sigma2) * delta).transpose();
    out.phi_draws[s] = sigma2;
  }
  return out;
}

PosteriorSample sample_logistic_normal(const Dataset& ds, const PriorSpec& prior, int burn_in,
                                       int n_draws, std::uint64_t seed, int thin) {
  if (ds.family.kind != FamilyKind::binomial)
    throw std::invalid_argument("logistic sampler requires the binomial family");
  check_draw_counts(burn_in, n_draws);
  if (thin < 1) throw std::invalid_argument("thin must be at least 1");
  const Index n = ds.n();
  const Index p = ds.p();

  const Vector pm = prior.prior_mean(p);
  const Matrix pcov = prior.prior_covariance(p);
  Eigen::LLT<Matrix> cov_llt(pcov);
  if (cov_llt.info() != Eigen::Success)
    throw std::invalid_argument("prior covariance must be positive definite");
  const Matrix prec = cov_llt.solve(Matrix::Identity(p, p));

  const Vector mode = irls_fit(ds.X, ds.y, ds.weights, FamilyKind::binomial, &prec, &pm);

  // Proposal shape from the curvature X'WX + V^{-1} at the mode.
  const Vector eta_mode = ds.X * mode;
  Vector w(n);
  for (Index i = 0; i < n; ++i)
    w[i] = ds.weights[i] * std::max(variance_from_theta(FamilyKind::binomial, eta_mode[i]), 1e-10);
  Matrix curvature = ds.X.transpose() * w.asDiagonal() * ds.X + prec;
  Eigen::LLT<Matrix> curv_llt(curvature);
  if (curv_llt.info() != Eigen::Success)
    throw SingularityError("posterior curvature not positive definite");
  const Matrix Lc = curv_llt.matrixL();

  auto log_post = [&](const Vector& beta) {
    const Vector eta = ds.X * beta;
    const Vector centered = beta - pm;
    return exp_family_loglik(FamilyKind::binomial, eta, ds.y, ds.weights) -
           0.5 * centered.dot(prec * centered);
  };

  std::mt19937_64 eng = make_engine(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  double scale = 2.38 / std::sqrt(static_cast<double>(p));
  Vector beta = mode;
  double lp = log_post(beta);

  const int total = burn_in + n_draws * thin;
  PosteriorSample out;
  out.draws.resize(n_draws, p);
  out.phi_draws = Vector::Ones(n_draws);
  out.diagnostics.seed = seed;
  out.diagnostics.burn_in = burn_in;
  out.diagnostics.thin = thin;

  int kept = 0;
  int window_accepts = 0;
  int window_count = 0;
  long post_accepts = 0;
  long post_count = 0;
  for (int t = 0; t < total; ++t) {
    Vector z(p);
    for (Index j = 0; j < p; ++j) z[j] = gauss(eng);
    const Vector step = Lc.transpose().triangularView<Eigen::Upper>().solve(z);
    const Vector cand = beta + scale * step;
    const double lp_cand = log_post(cand);
    const bool accept = std::log(unif(eng)) < lp_cand - lp;
    if (accept) {
      beta = cand;
      lp = lp_cand;
    }
    if (t < burn_in) {
      window_accepts += accept ? 1 : 0;
      if (++window_count == 100) {
        const double rate = window_accepts / 100.0;
        if (rate < 0.2)
          scale *= 0.8;
        else if (rate > 0.5)
          scale *= 1.25;
        window_accepts = 0;
        window_count = 0;
      }
    } else {
      post_accepts += accept ? 1 : 0;
      ++post_count;
      if ((t - burn_in) % thin == thin - 1) out.draws.row(kept++) = beta.transpose();
    }
  }

  out.diagnostics.acceptance = post_count > 0 ? static_cast<double>(post_accepts) / post_count : 0.0;
  if (out.diagnostics.acceptance < 0.05 || out.diagnostics.acceptance > 0.9) {
    std::ostringstream msg;
    msg << "metropolis tuning failed: acceptance " << out.diagnostics.acceptance << " after "
        << burn_in << " burn-in iterations (scale " << scale << ")";
    throw std::runtime_error(msg.str());
  }
  return out;
}

PosteriorSample sample_bayesian_lasso(const Dataset& ds, const PriorSpec& prior, int burn_in,
                                      int n_draws, std::uint64_t seed, int thin) {
  if (ds.family.kind != FamilyKind::gaussian)
    throw std::invalid_argument("bayesian lasso requires the gaussian family");
  check_draw_counts(burn_in, n_draws);
  if (thin < 1) throw std::invalid_argument("thin must be at least 1");
  for (int flag : ds.penalized)
    if (flag == 0)
      throw std::invalid_argument(
          "bayesian lasso handles the intercept by centering; drop unpenalized columns");
  if (!(prior.lambda_bl > 0.0)) throw std::invalid_argument("lambda_bl must be positive");
  if (!(prior.ig_shape > 0.0) || !(prior.ig_rate > 0.0))
    throw std::invalid_argument("inverse-gamma parameters must be positive");

  const Index n = ds.n();
  const Index p = ds.p();
  if (n < 2) throw std::invalid_argument("bayesian lasso requires n >= 2");

  // Flat-prior intercept integrates out after centering both sides.
  Matrix Xc = ds.X;
  const Vector col_means = Xc.colwise().mean();
  Xc.rowwise() -= col_means.transpose();
  Vector yc = ds.y;
  yc.array() -= yc.mean();

  const Matrix gram = Xc.transpose() * Xc;
  const Vector xty = Xc.transpose() * yc;
  const double lambda = prior.lambda_bl;

  std::mt19937_64 eng = make_engine(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Vector beta = Vector::Zero(p);
  Vector tau2 = Vector::Ones(p);
  double sigma2 = std::max(yc.squaredNorm() / std::max<Index>(n - 1, 1), 1e-8);

  PosteriorSample out;
  out.draws.resize(n_draws, p);
  out.phi_draws.resize(n_draws);
  out.diagnostics.seed = seed;
  out.diagnostics.burn_in = burn_in;
  out.diagnostics.thin = thin;

  const int total = burn_in + n_draws * thin;
  int kept = 0;
  for (int t = 0; t < total; ++t) {
    Matrix A = gram;
    A.diagonal() += tau2.cwiseInverse();
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() != Eigen::Success) throw SingularityError("gibbs precision not positive definite");
    const Vector mean = llt.solve(xty);
    Vector z(p);
    for (Index j = 0; j < p; ++j) z[j] = gauss(eng);
    const Matrix L = llt.matrixL();
    beta = mean + std::sqrt(sigma2) * L.transpose().triangularView<Eigen::Upper>().solve(z);

    for (Index j = 0; j < p; ++j) {
      const double bj2 = beta[j] * beta[j];
      const double mu_ig = std::sqrt(lambda * lambda * sigma2 / std::max(bj2, 1e-280));
      const double inv_tau2 = rand_inverse_gaussian(eng, mu_ig, lambda * lambda);
      double t2 = 1.0 / inv_tau2;
      if (t2 < 1e-12) {
        t2 = 1e-12;
        ++out.diagnostics.underflow_count;
      }
      tau2[j] = t2;
    }

    const double resid = (yc - Xc * beta).squaredNorm();
    const double quad = beta.cwiseQuotient(tau2.cwiseSqrt()).squaredNorm();
    const double shape = 0.5 * (n - 1) + 0.5 * p + prior.ig_shape;
    const double rate = 0.5 * resid + 0.5 * quad + prior.ig_rate;
    std::gamma_distribution<double> gamma(shape, 1.0);
    sigma2 = rate / std::max(gamma(eng), 1e-300);

    if (t >= burn_in && (t - burn_in) % thin == thin - 1) {
      out.draws.row(kept) = beta.transpose();
      out.phi_draws[kept] = sigma2;
      ++kept;
    }
  }
  return out;
}

}  // namespace klproj
