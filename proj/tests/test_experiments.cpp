#include "doctest.h"
#include "klproj/experiments.hpp"

using namespace klproj;

namespace {

bool exact_equal(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return false;
  for (Index k = 0; k < a.size(); ++k)
    if (a[k] != b[k]) return false;
  return true;
}

}  // namespace

TEST_CASE("covariance builders") {
  Matrix ar = ar1_covariance(4, 0.5);
  CHECK(ar(0, 0) == 1.0);
  CHECK(ar(0, 1) == 0.5);
  CHECK(ar(0, 3) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(ar(3, 1) == 0.25);
  CHECK_THROWS_AS(ar1_covariance(3, 1.0), std::invalid_argument);

  Matrix cs = compound_symmetric(5, 0.3);
  CHECK(cs(2, 2) == 1.0);
  CHECK(cs(0, 4) == 0.3);
  CHECK_THROWS_AS(compound_symmetric(5, -0.3), std::invalid_argument);
  CHECK_THROWS_AS(compound_symmetric(5, 1.0), std::invalid_argument);
}

TEST_CASE("scenario names round trip") {
  for (Scenario s : {Scenario::heredity_interaction, Scenario::large_p_example1,
                     Scenario::large_p_example2, Scenario::support_consistency,
                     Scenario::precondition_contrast})
    CHECK(parse_scenario(scenario_name(s)) == s);
  CHECK_THROWS_AS(parse_scenario("nope"), std::invalid_argument);
}

TEST_CASE("scenario defaults") {
  SimConfig h;
  h.scenario = Scenario::heredity_interaction;
  h = apply_defaults(h);
  CHECK(h.replicates == 100);
  CHECK(h.n == 50);
  CHECK(h.p == 9);
  CHECK(h.beta_true[0] == 3.0);
  CHECK(h.beta_true[1] == 2.0);
  CHECK(h.beta_true[6] == 1.5);
  CHECK(h.beta_true.cwiseAbs().sum() == 6.5);
  CHECK(h.sigma == 3.0);
  CHECK(h.seed == 7021);
  CHECK(h.lambda_grid.size() == 100);
  CHECK(h.lambda_grid[0] == 0.0);
  CHECK(h.lambda_grid[99] == 9.0);

  SimConfig e1;
  e1.scenario = Scenario::large_p_example1;
  e1 = apply_defaults(e1);
  CHECK(e1.seed == 40011);
  CHECK(e1.n == 20);
  CHECK(e1.p == 40);
  CHECK(e1.beta_true[10] == 2.0);
  CHECK(e1.beta_true[30] == 2.0);
  CHECK(e1.beta_true[0] == 0.0);

  SimConfig e2;
  e2.scenario = Scenario::large_p_example2;
  e2 = apply_defaults(e2);
  CHECK(e2.seed == 40022);
  CHECK(e2.beta_true.head(5).minCoeff() == 4.0);
  CHECK(e2.beta_true.tail(35).cwiseAbs().maxCoeff() == 0.0);

  SimConfig pc;
  pc.scenario = Scenario::precondition_contrast;
  pc = apply_defaults(pc);
  CHECK(pc.seed == 60001);
  CHECK(pc.replicates == 1);

  SimConfig sc;
  sc.scenario = Scenario::support_consistency;
  sc = apply_defaults(sc);
  CHECK(sc.seed == 11);
  CHECK(sc.replicates == 30);
  CHECK(sc.p == 4);
  CHECK(sc.beta_true[0] == 1.2);
  CHECK(sc.beta_true[1] == -0.8);
  CHECK(sc.beta_true[2] == 0.6);
  CHECK(sc.beta_true[3] == 0.0);
  CHECK(sc.draws == 400);
  CHECK(sc.burn_in == 500);
  REQUIRE(sc.ladder.size() == 4);
  CHECK(sc.ladder[0] == 50);
  CHECK(sc.ladder[3] == 3200);
}

TEST_CASE("heredity endpoints behave like the null and the full model") {
  SimConfig cfg;
  cfg.scenario = Scenario::heredity_interaction;
  cfg.replicates = 1;
  cfg.draws = 150;
  cfg.lambda_grid = Vector(2);
  cfg.lambda_grid << 0.0, 9.0;
  auto [strong, plain] = run_heredity_sim(cfg);
  for (const SimMetrics* m : {&strong, &plain}) {
    CHECK(m->expected_size[0] == 0.0);
    CHECK(m->loss[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m->encompassing[0] == 0.0);
    CHECK(m->expected_size[1] == 9.0);
    CHECK(m->loss[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m->encompassing[1] == 1.0);
  }
}

TEST_CASE("worker fan-out does not change the averages") {
  SimConfig cfg;
  cfg.scenario = Scenario::heredity_interaction;
  cfg.replicates = 3;
  cfg.draws = 80;
  cfg.lambda_grid = Vector(3);
  cfg.lambda_grid << 0.0, 4.5, 9.0;
  cfg.workers = 1;
  auto [s1, u1] = run_heredity_sim(cfg);
  cfg.workers = 3;
  auto [s3, u3] = run_heredity_sim(cfg);
  CHECK(exact_equal(s1.expected_size, s3.expected_size));
  CHECK(exact_equal(s1.loss, s3.loss));
  CHECK(exact_equal(s1.encompassing, s3.encompassing));
  CHECK(exact_equal(u1.expected_size, u3.expected_size));
  CHECK(exact_equal(u1.loss, u3.loss));
  CHECK(exact_equal(u1.encompassing, u3.encompassing));
}

TEST_CASE("a silent design yields a degenerate denominator at zero selections") {
  SimConfig cfg;
  cfg.scenario = Scenario::large_p_example1;
  cfg.replicates = 2;
  cfg.n = 12;
  cfg.p = 16;
  cfg.beta_true = Vector::Zero(16);
  cfg.draws = 60;
  cfg.burn_in = 60;
  cfg.lambda_grid = Vector(3);
  cfg.lambda_grid << 0.0, 8.0, 16.0;
  SimMetrics m = run_large_p_sim(cfg);
  CHECK(m.fdr[0] == 0.0);
  CHECK(m.fdr_degenerate[0] == 1);
  CHECK(m.fdr[1] == 1.0);
  CHECK(m.fdr_degenerate[1] == 0);
  CHECK(m.fdr[2] == 1.0);
  CHECK(m.expected_size[2] == 16.0);
  CHECK(m.replicate_separation.size() == 2);
}

TEST_CASE("consistency ladders report per-rung recovery fractions") {
  SimConfig cfg;
  cfg.scenario = Scenario::support_consistency;
  cfg.replicates = 2;
  cfg.draws = 60;
  cfg.burn_in = 100;
  cfg.ladder = {30, 60};
  SimMetrics m = run_consistency_check(cfg);
  REQUIRE(m.ladder_n.size() == 2);
  CHECK(m.ladder_n[0] == 30.0);
  CHECK(m.ladder_n[1] == 60.0);
  for (Index r = 0; r < 2; ++r) {
    CHECK(m.recovery[r] >= 0.0);
    CHECK(m.recovery[r] <= 1.0);
    CHECK(m.recovery_draws[r] >= 0.0);
    CHECK(m.recovery_draws[r] <= 1.0);
  }

  cfg.growth = PenaltyGrowth::linear;
  SimMetrics lin = run_consistency_check(cfg);
  CHECK(lin.recovery.size() == 2);
}

TEST_CASE("plug-in contrast reduces the ensemble to one component") {
  SimConfig cfg;
  cfg.scenario = Scenario::precondition_contrast;
  cfg.replicates = 1;
  cfg.n = 10;
  cfg.p = 12;
  cfg.draws = 50;
  cfg.burn_in = 60;
  cfg.lambda_grid = Vector(3);
  cfg.lambda_grid << 0.0, 6.0, 12.0;
  auto [ens, plug] = run_preconditioning_contrast(cfg);
  CHECK(ens.inclusion.rows() == 3);
  CHECK(ens.inclusion.cols() == 12);
  CHECK(plug.inclusion.rows() == 3);
  for (Index k = 0; k < 3; ++k)
    for (Index j = 0; j < 12; ++j) {
      const double v = plug.inclusion(k, j);
      CHECK((v == 0.0 || v == 1.0));
    }
  CHECK(ens.replicate_separation.size() == 1);
}

TEST_CASE("scenario guards reject mismatched runners") {
  SimConfig cfg;
  cfg.scenario = Scenario::large_p_example1;
  CHECK_THROWS_AS(run_heredity_sim(cfg), std::invalid_argument);
  cfg.scenario = Scenario::heredity_interaction;
  CHECK_THROWS_AS(run_large_p_sim(cfg), std::invalid_argument);
  CHECK_THROWS_AS(run_consistency_check(cfg), std::invalid_argument);
  CHECK_THROWS_AS(run_preconditioning_contrast(cfg), std::invalid_argument);
}
