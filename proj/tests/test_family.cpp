#include <cmath>
#include <random>

#include "doctest.h"
#include "klproj/glm.hpp"
#include "klproj/rng.hpp"

using namespace klproj;

TEST_CASE("poisson KL closed form") {
  Vector mu_full(1), mu_sub(1), A(1);
  mu_full << 2.0;
  mu_sub << 1.0;
  A << 1.0;
  // mu_f log(mu_f / mu_s) - mu_f + mu_s = 2 log 2 - 1
  CHECK(kl_from_means(FamilyKind::poisson, mu_full, mu_sub, A) ==
        doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("binomial KL closed form") {
  Vector mu_full(1), mu_sub(1), A(1);
  mu_full << 0.8;
  mu_sub << 0.5;
  A << 3.0;
  double expect = 3.0 * (0.8 * std::log(0.8 / 0.5) + 0.2 * std::log(0.2 / 0.5));
  CHECK(kl_from_means(FamilyKind::binomial, mu_full, mu_sub, A) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("gaussian KL with projected dispersion collapses to the log form") {
  Vector mu_full(2), mu_sub(2), A(2);
  mu_full << 1.0, 0.0;
  mu_sub << 0.0, 0.0;
  A << 1.0, 1.0;
  double phi = 1.0;
  double phi_sub = project_sigma(phi, mu_full, mu_sub);
  CHECK(phi_sub == doctest::Approx(1.5).epsilon(1e-14));
  double kl = kl_from_means(FamilyKind::gaussian, mu_full, mu_sub, A, phi, phi_sub);
  CHECK(kl == doctest::Approx(std::log(1.5)).epsilon(1e-12));
  // any other dispersion does worse
  CHECK(kl_from_means(FamilyKind::gaussian, mu_full, mu_sub, A, phi, 1.2) > kl);
  CHECK(kl_from_means(FamilyKind::gaussian, mu_full, mu_sub, A, phi, 2.0) > kl);
}

TEST_CASE("KL nonnegative, zero iff equal") {
  auto eng = make_engine(31);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  std::normal_distribution<double> gauss(0.0, 2.0);
  for (FamilyKind k : {FamilyKind::gaussian, FamilyKind::binomial, FamilyKind::poisson}) {
    for (int it = 0; it < 1000; ++it) {
      Vector mf(3), ms(3), A(3);
      for (Index i = 0; i < 3; ++i) {
        switch (k) {
          case FamilyKind::gaussian:
            mf[i] = gauss(eng);
            ms[i] = gauss(eng);
            break;
          case FamilyKind::binomial:
            mf[i] = unif(eng);
            ms[i] = unif(eng);
            break;
          case FamilyKind::poisson:
            mf[i] = std::exp(gauss(eng) * 0.5);
            ms[i] = std::exp(gauss(eng) * 0.5);
            break;
        }
        A[i] = 0.5 + unif(eng);
      }
      CHECK(kl_from_means(k, mf, ms, A) >= 0.0);
      CHECK(kl_from_means(k, mf, mf, A) == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("cumulant derivative matches the mean function") {
  for (FamilyKind k : {FamilyKind::gaussian, FamilyKind::binomial, FamilyKind::poisson}) {
    for (double theta : {-2.0, -0.5, 0.0, 0.7, 1.9}) {
      double h = 1e-6;
      double fd = (cumulant(k, theta + h) - cumulant(k, theta - h)) / (2.0 * h);
      CHECK(fd == doctest::Approx(mean_from_theta(k, theta)).epsilon(1e-7));
      double fd2 = (mean_from_theta(k, theta + h) - mean_from_theta(k, theta - h)) / (2.0 * h);
      CHECK(fd2 == doctest::Approx(variance_from_theta(k, theta)).epsilon(1e-5));
    }
  }
}

TEST_CASE("mean_from_eta clamps the binomial tail") {
  Vector eta(2);
  eta << 100.0, -100.0;
  Vector mu = mean_from_eta(FamilyKind::binomial, eta);
  CHECK(mu[0] < 1.0);
  CHECK(mu[0] > 0.99);
  CHECK(mu[1] > 0.0);
  CHECK(mu[1] < 0.01);
}

TEST_CASE("gaussian loglik differences match the residual form") {
  auto eng = make_engine(77);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector y(4), eta1(4), eta2(4), A = Vector::Ones(4);
  for (Index i = 0; i < 4; ++i) {
    y[i] = gauss(eng);
    eta1[i] = gauss(eng);
    eta2[i] = gauss(eng);
  }
  double phi = 1.7;
  double lhs = exp_family_loglik(FamilyKind::gaussian, eta1, y, A, phi) -
               exp_family_loglik(FamilyKind::gaussian, eta2, y, A, phi);
  double rhs = (-0.5 * (y - eta1).squaredNorm() + 0.5 * (y - eta2).squaredNorm()) / phi;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("inverse gaussian sampler: moments and extreme-mean stability") {
  auto eng = make_engine(2024);
  double mu = 2.0, lambda = 8.0;
  double sum = 0.0, sumsq = 0.0;
  int n = 200000;
  for (int i = 0; i < n; ++i) {
    double x = rand_inverse_gaussian(eng, mu, lambda);
    REQUIRE(x > 0.0);
    sum += x;
    sumsq += x * x;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(mean == doctest::Approx(mu).epsilon(0.02));
  CHECK(var == doctest::Approx(mu * mu * mu / lambda).epsilon(0.05));

  for (int i = 0; i < 1000; ++i) {
    double x = rand_inverse_gaussian(eng, 1e140, 4.0);
    REQUIRE(std::isfinite(x));
    REQUIRE(x > 0.0);
  }
}
