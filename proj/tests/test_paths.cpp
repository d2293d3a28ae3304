#include <random>

#include "doctest.h"
#include "klproj/glm.hpp"
#include "klproj/glm_path.hpp"
#include "klproj/kkt.hpp"
#include "klproj/lasso_path.hpp"
#include "klproj/rng.hpp"
#include "oracles.hpp"

using namespace klproj;

TEST_CASE("univariate homotopy is the soft threshold line") {
  Matrix X(1, 1);
  X << 1.0;
  Vector y(1);
  y << 4.0;
  PenaltySpec pen = lasso_penalty({1});
  SolutionPath path = lasso_path_gaussian(X, y, pen);
  REQUIRE(path.knots.size() == 2);
  CHECK(path.knots.front().delta == doctest::Approx(4.0));
  CHECK(path.knots.front().beta[0] == doctest::Approx(0.0));
  CHECK(path.knots.back().delta == doctest::Approx(0.0));
  CHECK(path.knots.back().beta[0] == doctest::Approx(4.0));
  CHECK(path_at_delta(path, 2.5)[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(path_at_constraint(path, 1.0)[0] == doctest::Approx(1.0).epsilon(1e-12));
  // beyond the attained constraint the path clamps to the unpenalized end
  CHECK(path_at_constraint(path, 9.0)[0] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("homotopy knots match the exhaustive sign-pattern oracle") {
  auto eng = make_engine(404);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.3, 2.0);
  for (int rep = 0; rep < 60; ++rep) {
    Index n = 12, p = 4;
    Matrix X(n, p);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < p; ++j) X(i, j) = gauss(eng);
    Vector y(n);
    for (Index i = 0; i < n; ++i) y[i] = gauss(eng) * 2.0;
    PenaltySpec pen;
    pen.kind = PenaltySpec::Kind::adaptive_lasso;
    pen.weights = Vector::Zero(p);
    for (Index j = 0; j < p; ++j) pen.weights[j] = unif(eng);
    if (rep % 3 == 0) pen.weights[0] = 0.0;  // unpenalized column

    SolutionPath path = lasso_path_gaussian(X, y, pen);
    REQUIRE(!path.knots.empty());
    for (size_t k = 0; k < path.knots.size(); ++k) {
      // strictly between knots too, where the path is linear in delta
      double delta = path.knots[k].delta;
      Vector oracle = oracles::sign_pattern_lasso(X, y, pen.weights, delta);
      Vector mine = path.knots[k].beta;
      CHECK((mine - oracle).lpNorm<Eigen::Infinity>() < 1e-8);
    }
    KktReport report = kkt_check_path(path, X, Vector::Ones(n), pen);
    CHECK(report.pass);
  }
}

TEST_CASE("adaptive weights equal a rescaled plain lasso") {
  auto eng = make_engine(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Index n = 20, p = 3;
  Matrix X(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = gauss(eng);
  Vector y(n);
  for (Index i = 0; i < n; ++i) y[i] = gauss(eng);
  Vector w(3);
  w << 0.5, 1.25, 2.0;

  PenaltySpec weighted;
  weighted.kind = PenaltySpec::Kind::adaptive_lasso;
  weighted.weights = w;
  SolutionPath wpath = lasso_path_gaussian(X, y, weighted);

  Matrix Xs = X;
  for (Index j = 0; j < p; ++j) Xs.col(j) /= w[j];
  PenaltySpec plain = lasso_penalty({1, 1, 1});
  SolutionPath spath = lasso_path_gaussian(Xs, y, plain);

  for (double delta : {0.1, 0.5, 1.3}) {
    Vector bw = path_at_delta(wpath, delta);
    Vector bs = path_at_delta(spath, delta);
    for (Index j = 0; j < p; ++j)
      CHECK(bw[j] == doctest::Approx(bs[j] / w[j]).epsilon(1e-9));
  }
}

TEST_CASE("glm solve at zero penalty matches IRLS") {
  auto eng = make_engine(23);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Index n = 80, p = 3;
  Matrix X(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = gauss(eng);
  Vector beta0(p);
  beta0 << 1.0, -0.5, 0.25;
  Vector y(n);
  for (Index i = 0; i < n; ++i)
    y[i] = unif(eng) < 1.0 / (1.0 + std::exp(-X.row(i).dot(beta0))) ? 1.0 : 0.0;
  Vector A = Vector::Ones(n);

  Vector mode = irls_fit(X, y, A, FamilyKind::binomial);
  PenaltySpec pen = lasso_penalty({1, 1, 1});
  bool converged = false;
  Vector cd = glm_penalized_solve(X, y, A, FamilyKind::binomial, pen, 0.0, Vector::Zero(p),
                                  &converged);
  CHECK(converged);
  CHECK((cd - mode).lpNorm<Eigen::Infinity>() < 1e-5);
}

TEST_CASE("glm coordinate descent matches the proximal-gradient oracle") {
  auto eng = make_engine(59);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Index n = 40, p = 4;
  for (int rep = 0; rep < 10; ++rep) {
    Matrix X(n, p);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < p; ++j) X(i, j) = gauss(eng);
    Vector beta_d(p);
    for (Index j = 0; j < p; ++j) beta_d[j] = 0.8 * gauss(eng);
    Vector mu = mean_from_eta(FamilyKind::binomial, X * beta_d);
    Vector A = Vector::Ones(n);
    Vector w = Vector::Ones(p);
    w[0] = 0.0;  // intercept-like column

    PenaltySpec pen;
    pen.kind = PenaltySpec::Kind::adaptive_lasso;
    pen.weights = w;
    for (double delta : {0.2, 1.0, 4.0}) {
      bool converged = false;
      Vector cd = glm_penalized_solve(X, mu, A, FamilyKind::binomial, pen, delta,
                                      Vector::Zero(p), &converged);
      REQUIRE(converged);
      auto loss = [&](const Vector& b, Vector& grad) {
        Vector eta = X * b;
        Vector m = mean_from_eta(FamilyKind::binomial, eta);
        grad = -X.transpose() * (A.asDiagonal() * (mu - m));
        return -exp_family_loglik(FamilyKind::binomial, eta, mu, A);
      };
      Vector ista = oracles::ista(loss, p, w, delta, Vector::Zero(p));
      Vector g(p);
      double obj_cd = loss(cd, g) + delta * (w.array() * cd.array().abs()).sum();
      double obj_or = loss(ista, g) + delta * (w.array() * ista.array().abs()).sum();
      CHECK(obj_cd <= obj_or + 1e-6 * std::max(1.0, std::abs(obj_or)));
      CHECK((cd - ista).lpNorm<Eigen::Infinity>() < 1e-4);
    }
  }
}

TEST_CASE("delta_max zeroes every penalized coefficient") {
  auto eng = make_engine(71);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Index n = 30, p = 4;
  Matrix X(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = gauss(eng);
  Vector beta_d(p);
  beta_d << 0.5, -0.7, 0.2, 0.9;
  Vector mu = mean_from_eta(FamilyKind::poisson, X * beta_d);
  Vector A = Vector::Ones(n);
  std::vector<char> mask = {0, 1, 1, 1};
  PenaltySpec pen;
  pen.kind = PenaltySpec::Kind::adaptive_lasso;
  pen.weights = Vector::Ones(p);
  pen.weights[0] = 0.0;

  double dmax = glm_delta_max(X, mu, A, FamilyKind::poisson, pen, mask);
  bool converged = false;
  Vector b = glm_penalized_solve(X, mu, A, FamilyKind::poisson, pen, dmax * 1.0001,
                                 Vector::Zero(p), &converged);
  REQUIRE(converged);
  for (Index j = 1; j < p; ++j) CHECK(std::abs(b[j]) < 1e-10);
  CHECK(std::abs(b[0]) > 1e-4);  // unpenalized column still fits

  Vector b2 = glm_penalized_solve(X, mu, A, FamilyKind::poisson, pen, dmax * 0.9,
                                  Vector::Zero(p), &converged);
  CHECK(b2.tail(p - 1).cwiseAbs().maxCoeff() > 1e-10);
}

TEST_CASE("glm path grid is warm started and monotone in the constraint") {
  auto eng = make_engine(83);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Index n = 50, p = 4;
  Matrix X(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = gauss(eng);
  Vector beta_d(p);
  beta_d << 1.0, -0.6, 0.3, 0.0;
  Vector mu = mean_from_eta(FamilyKind::binomial, X * beta_d);
  Vector A = Vector::Ones(n);
  PenaltySpec pen = lasso_penalty({1, 1, 1, 1});

  double dmax = glm_delta_max(X, mu, A, FamilyKind::binomial, pen, {1, 1, 1, 1});
  SolutionPath path = glm_penalized_path(X, mu, A, FamilyKind::binomial, pen,
                                         default_delta_grid(dmax, 40));
  REQUIRE(path.knots.size() == 40);
  for (size_t k = 1; k < path.knots.size(); ++k) {
    CHECK(path.knots[k].delta < path.knots[k - 1].delta);
    CHECK(path.knots[k].constraint_value >=
          path.knots[k - 1].constraint_value - 1e-7);
  }
  KktReport report = kkt_check_path(path, X, A, pen, 1e-5);
  CHECK(report.pass);
}
