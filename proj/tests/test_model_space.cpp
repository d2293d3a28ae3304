#include <random>

#include "doctest.h"
#include "klproj/model_space.hpp"
#include "klproj/rng.hpp"

using namespace klproj;

namespace {

Dataset toy_gaussian(Index n = 50, std::uint64_t seed = 9) {
  auto eng = make_engine(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix X(n, 4);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = gauss(eng);
    X(i, 2) = gauss(eng);
    X(i, 3) = gauss(eng);
    y[i] = 0.5 + 1.2 * X(i, 1) - 0.9 * X(i, 2) + 0.5 * gauss(eng);
  }
  return make_dataset(X, y, Family::gaussian(), Vector(), {"(intercept)", "a", "b", "c"},
                      {0, 1, 1, 1});
}

/// Two-level ensemble with known sparsity patterns per draw.
ProjectionEnsemble hand_ensemble() {
  ProjectionEnsemble ens;
  ens.family = FamilyKind::gaussian;
  ens.lambda_grid = Vector(2);
  ens.lambda_grid << 0.5, 1.5;
  ens.penalized = {0, 1, 1};
  ens.names = {"(intercept)", "a", "b"};
  Matrix b0(5, 3), b1(5, 3);
  b0 << 0.3, 0.0, 0.0,
        0.3, 1.0, 0.0,
        0.3, 0.9, 0.0,
        0.3, 0.0, 0.7,
        0.3, 1.1, 0.6;
  b1 << 0.3, 0.5, 0.0,
        0.3, 1.0, 0.0,
        0.3, 0.9, 0.4,
        0.3, 0.0, 0.7,
        0.3, 1.1, 0.6;
  ens.beta = {b0, b1};
  ens.phi = {Vector::Ones(5), Vector::Ones(5)};
  ens.kl = Matrix::Zero(5, 2);
  ens.null_kl = Vector::Ones(5);
  return ens;
}

}  // namespace

TEST_CASE("inclusion probabilities sum to the expected model size") {
  Dataset ds = toy_gaussian();
  PosteriorSample sample = sample_gaussian_noninformative(ds, 60, 13);
  ConstraintSpec spec;
  Vector grid = default_lambda_grid(ds, sample, spec, 15);
  ProjectionEnsemble ens = project_sample(ds, sample, spec, grid);
  for (Index k = 0; k < ens.grid_size(); ++k) {
    const double lambda = ens.lambda_grid[k];
    const Vector incl = inclusion_probabilities(ens, lambda);
    CHECK(incl[0] == 0.0);
    for (Index j = 0; j < incl.size(); ++j) {
      CHECK(incl[j] >= 0.0);
      CHECK(incl[j] <= 1.0);
    }
    CHECK(incl.sum() == doctest::Approx(expected_model_size(ens, lambda)).epsilon(1e-12));
  }
}

TEST_CASE("frequency table counts patterns at one level") {
  ProjectionEnsemble ens = hand_ensemble();
  ModelTable table = model_frequencies(ens, Pooling::at_lambda, 0.5);
  REQUIRE(table.rows.size() == 4);
  CHECK(table.total == 5);

  CHECK(table.rows[0].id.label(ens.names) == "{}");
  CHECK(table.rows[0].count == 1);
  CHECK(table.rows[0].freq == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(table.rows[0].freq_within_size == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(table.rows[1].id.label(ens.names) == "{a}");
  CHECK(table.rows[1].count == 2);
  CHECK(table.rows[1].freq_within_size == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  CHECK(table.rows[2].id.label(ens.names) == "{b}");
  CHECK(table.rows[2].count == 1);
  CHECK(table.rows[2].freq_within_size == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  CHECK(table.rows[3].id.label(ens.names) == "{a,b}");
  CHECK(table.rows[3].id.count() == 2);

  double freq_sum = 0.0;
  long count_sum = 0;
  for (const ModelRow& row : table.rows) {
    freq_sum += row.freq;
    count_sum += row.count;
  }
  CHECK(freq_sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(count_sum == table.total);
}

TEST_CASE("path pooling counts each pattern once per draw") {
  ProjectionEnsemble ens = hand_ensemble();
  ModelTable table = model_frequencies(ens, Pooling::along_path);
  CHECK(table.total == 7);
  auto count_of = [&](const std::string& want) {
    for (const ModelRow& row : table.rows)
      if (row.id.label(ens.names) == want) return row.count;
    return 0L;
  };
  CHECK(count_of("{}") == 1);
  CHECK(count_of("{a}") == 3);
  CHECK(count_of("{b}") == 1);
  CHECK(count_of("{a,b}") == 2);
  CHECK(table.provenance == "along_path");
}

TEST_CASE("mixture splits exactly across the model table") {
  ProjectionEnsemble ens = hand_ensemble();
  Matrix new_X(1, 3);
  new_X << 1.0, 2.0, -1.0;
  const double lambda = 0.5;
  PredictiveMixture mix = predictive_mixture(ens, lambda, new_X);

  const Index g = ens.grid_index(lambda);
  std::vector<ModelId> ids = ens.models_at(g);
  ModelTable table = model_frequencies(ens, Pooling::at_lambda, lambda);

  double mean_mixed = 0.0;
  double var_mixed = 0.0;
  for (const ModelRow& row : table.rows) {
    double m_sum = 0.0, m2_sum = 0.0, phi_sum = 0.0;
    long members = 0;
    for (Index i = 0; i < ens.draws(); ++i) {
      if (!(ids[static_cast<std::size_t>(i)] == row.id)) continue;
      const double m = mix.component_means(i, 0);
      m_sum += m;
      m2_sum += m * m;
      phi_sum += mix.component_phis[i];
      ++members;
    }
    REQUIRE(members == row.count);
    const double within_mean = m_sum / members;
    const double within_raw2 = m2_sum / members;
    mean_mixed += row.freq * within_mean;
    var_mixed += row.freq * (phi_sum / members + within_raw2);
  }
  var_mixed -= mean_mixed * mean_mixed;
  CHECK(mix.mean[0] == doctest::Approx(mean_mixed).epsilon(1e-10));
  CHECK(mix.variance[0] == doctest::Approx(var_mixed).epsilon(1e-10));
}

TEST_CASE("model identity semantics") {
  ModelId empty(6, {});
  ModelId ab(6, {1, 2});
  ModelId ba(6, {2, 1});
  CHECK(ab == ba);
  CHECK(ab.hash() == ba.hash());
  CHECK(ab != empty);
  CHECK(ab.count() == 2);
  CHECK(ab.contains(1));
  CHECK(!ab.contains(3));
  CHECK(empty < ab);
  CHECK_THROWS_AS(ModelId(3, {5}), std::out_of_range);

  Vector beta(4);
  beta << 0.5, 1e-12, -0.7, 0.0;
  ModelId id = ModelId::from_beta(beta, {0, 1, 1, 1}, 1e-8);
  CHECK(id.count() == 1);
  CHECK(id.contains(2));
  CHECK(!id.contains(0));
  CHECK(!id.contains(1));
}
