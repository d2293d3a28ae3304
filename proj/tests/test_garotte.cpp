#include <random>

#include "doctest.h"
#include "klproj/garotte.hpp"
#include "klproj/qp.hpp"
#include "klproj/rng.hpp"
#include "oracles.hpp"

using namespace klproj;

namespace {

Matrix orthonormal_design(Index n, Index p, std::uint64_t seed) {
  auto eng = make_engine(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix X(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = gauss(eng);
  Eigen::HouseholderQR<Matrix> qr(X);
  return Matrix(qr.householderQ()).leftCols(p);
}

HeredityGraph no_heredity(Index p) {
  HeredityGraph g;
  g.mode = HeredityMode::none;
  g.parents.assign(static_cast<size_t>(p), {});
  return g;
}

void build_polytope(Index p, double lambda, const HeredityGraph& h, Matrix& C, Vector& d) {
  Matrix H = heredity_rows(h, p);
  C.resize(p + 1 + H.rows(), p);
  C.topRows(p) = -Matrix::Identity(p, p);
  C.row(p).setOnes();
  if (H.rows() > 0) C.bottomRows(H.rows()) = H;
  d = Vector::Zero(C.rows());
  d[p] = lambda;
}

}  // namespace

TEST_CASE("unconstrained budget recovers theta = 1") {
  Matrix X = orthonormal_design(12, 3, 2) * 2.0;
  Vector beta_star(3);
  beta_star << 1.0, -2.0, 0.5;
  Vector target = X * beta_star;
  GarotteSolution sol = garotte_fit(X, beta_star, target, 4.0, no_heredity(3));
  REQUIRE(sol.converged);
  CHECK((sol.theta - Vector::Ones(3)).lpNorm<Eigen::Infinity>() < 1e-8);
  CHECK((sol.effective_beta - beta_star).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("zero budget gives theta = 0 and negative lambda throws") {
  Matrix X = orthonormal_design(10, 3, 4);
  Vector beta_star = Vector::Ones(3);
  Vector target = X * beta_star;
  GarotteSolution sol = garotte_fit(X, beta_star, target, 0.0, no_heredity(3));
  REQUIRE(sol.converged);
  CHECK(sol.theta.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(sol.active.empty());
  CHECK_THROWS_AS(garotte_fit(X, beta_star, target, -0.5, no_heredity(3)),
                  std::invalid_argument);
}

TEST_CASE("orthonormal designs yield nested active sets along the budget") {
  Matrix X = orthonormal_design(20, 4, 6);
  Vector beta_star(4);
  beta_star << 2.0, -1.2, 0.7, 0.3;
  auto eng = make_engine(8);
  std::normal_distribution<double> gauss(0.0, 0.1);
  Vector target = X * beta_star;
  for (Index i = 0; i < target.size(); ++i) target[i] += gauss(eng);

  std::vector<Index> last;
  for (double lambda : {0.3, 0.8, 1.5, 2.5, 4.0}) {
    GarotteSolution sol = garotte_fit(X, beta_star, target, lambda, no_heredity(4));
    REQUIRE(sol.converged);
    for (Index j : last)
      CHECK(std::find(sol.active.begin(), sol.active.end(), j) != sol.active.end());
    last = sol.active;
    KktReport report = garotte_kkt_check(X, beta_star, target, sol, no_heredity(4));
    CHECK(report.pass);
  }
}

TEST_CASE("strong heredity holds coordinatewise") {
  auto eng = make_engine(12);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix X(30, 3);
  for (Index i = 0; i < 30; ++i) {
    X(i, 0) = gauss(eng);
    X(i, 1) = gauss(eng);
    X(i, 2) = X(i, 0) * X(i, 1);
  }
  Vector beta_star(3);
  beta_star << 0.2, 0.3, 2.0;  // interaction dominates, parents weak
  HeredityGraph strong = make_heredity_graph(HeredityMode::strong, {{}, {}, {0, 1}});
  Vector target = X * beta_star;
  for (double lambda : {0.5, 1.0, 2.0}) {
    GarotteSolution sol = garotte_fit(X, beta_star, target, lambda, strong);
    REQUIRE(sol.converged);
    CHECK(sol.theta[2] <= sol.theta[0] + 1e-8);
    CHECK(sol.theta[2] <= sol.theta[1] + 1e-8);
    KktReport report = garotte_kkt_check(X, beta_star, target, sol, strong);
    CHECK(report.pass);
  }
}

TEST_CASE("weak heredity bounds the child by the parent sum") {
  auto eng = make_engine(14);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix X(40, 3);
  for (Index i = 0; i < 40; ++i) {
    X(i, 0) = gauss(eng);
    X(i, 1) = gauss(eng);
    X(i, 2) = X(i, 0) * X(i, 1);
  }
  Vector beta_star(3);
  beta_star << 0.1, 0.1, 1.5;
  HeredityGraph weak = make_heredity_graph(HeredityMode::weak, {{}, {}, {0, 1}});
  Vector target = X * beta_star;
  GarotteSolution sol = garotte_fit(X, beta_star, target, 1.2, weak);
  REQUIRE(sol.converged);
  CHECK(sol.theta[2] <= sol.theta[0] + sol.theta[1] + 1e-8);
}

TEST_CASE("heredity graph validation") {
  CHECK_THROWS_AS(make_heredity_graph(HeredityMode::strong, {{1}, {0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_heredity_graph(HeredityMode::strong, {{0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_heredity_graph(HeredityMode::strong, {{5}, {}}), std::invalid_argument);
  CHECK_NOTHROW(make_heredity_graph(HeredityMode::strong, {{}, {0}, {0, 1}}));
}

TEST_CASE("garotte matches the projected-gradient oracle") {
  auto eng = make_engine(900);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    Index n = 16, p = 4;
    Matrix X(n, p);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < p; ++j) X(i, j) = gauss(eng);
    Vector beta_star(p);
    for (Index j = 0; j < p; ++j) beta_star[j] = gauss(eng) + (j < 2 ? 1.5 : 0.0);
    Vector target(n);
    for (Index i = 0; i < n; ++i) target[i] = gauss(eng) * 1.5;
    HeredityGraph h = rep % 2 == 0
                          ? no_heredity(p)
                          : make_heredity_graph(HeredityMode::strong, {{}, {}, {0}, {1}});
    double lambda = 0.2 + 3.0 * unif(eng);

    GarotteSolution sol = garotte_fit(X, beta_star, target, lambda, h);
    REQUIRE(sol.converged);

    Matrix Z = X * beta_star.asDiagonal();
    Matrix C;
    Vector d;
    build_polytope(p, lambda, h, C, d);
    Vector pg = oracles::projected_gradient_qp(Z, target, C, d);
    double obj_mine = oracles::gaussian_qp_objective(Z, target, sol.theta);
    double obj_pg = oracles::gaussian_qp_objective(Z, target, pg);
    CHECK(obj_mine <= obj_pg + 1e-4 * std::max(1.0, obj_pg));

    KktReport report = garotte_kkt_check(X, beta_star, target, sol, h);
    CHECK(report.pass);
  }
}

TEST_CASE("warm starts agree with cold solves") {
  auto eng = make_engine(33);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix X(20, 3);
  for (Index i = 0; i < 20; ++i)
    for (Index j = 0; j < 3; ++j) X(i, j) = gauss(eng);
  Vector beta_star(3);
  beta_star << 1.0, -0.8, 0.6;
  Vector target(20);
  for (Index i = 0; i < 20; ++i) target[i] = gauss(eng);

  Vector warm;
  for (double lambda : {0.4, 1.1, 2.3}) {
    GarotteSolution cold = garotte_fit(X, beta_star, target, lambda, no_heredity(3));
    GarotteSolution hot = garotte_fit(X, beta_star, target, lambda, no_heredity(3),
                                      FamilyKind::gaussian, nullptr, warm.size() ? &warm : nullptr);
    REQUIRE(cold.converged);
    REQUIRE(hot.converged);
    CHECK((cold.theta - hot.theta).lpNorm<Eigen::Infinity>() < 1e-8);
    warm = cold.theta;
  }
}

TEST_CASE("binomial garotte drops a null coordinate") {
  auto eng = make_engine(48);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Index n = 200, p = 3;
  Matrix X(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = gauss(eng);
  Vector beta_star(p);
  beta_star << 1.5, -1.0, 0.02;
  Vector eta = X * beta_star;
  Vector target(n);
  for (Index i = 0; i < n; ++i) target[i] = 1.0 / (1.0 + std::exp(-eta[i]));

  GarotteSolution sol =
      garotte_fit(X, beta_star, target, 1.5, no_heredity(p), FamilyKind::binomial);
  REQUIRE(sol.converged);
  CHECK(sol.theta[0] > 0.5);
  CHECK(sol.theta[1] > 0.5);
  CHECK(sol.theta[2] < 0.2);
  CHECK(sol.theta.sum() <= 1.5 + 1e-8);
}
