#include "klproj/experiments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "klproj/glm_path.hpp"
#include "klproj/parallel.hpp"
#include "klproj/penalty.hpp"
#include "klproj/rng.hpp"

namespace klproj {

Scenario parse_scenario(const std::string& name) {
  if (name == "heredity_interaction") return Scenario::heredity_interaction;
  if (name == "large_p_example1") return Scenario::large_p_example1;
  if (name == "large_p_example2") return Scenario::large_p_example2;
  if (name == "support_consistency") return Scenario::support_consistency;
  if (name == "precondition_contrast") return Scenario::precondition_contrast;
  throw std::invalid_argument("unknown scenario: " + name);
}

std::string scenario_name(Scenario scenario) {
  switch (scenario) {
    case Scenario::heredity_interaction:
      return "heredity_interaction";
    case Scenario::large_p_example1:
      return "large_p_example1";
    case Scenario::large_p_example2:
      return "large_p_example2";
    case Scenario::support_consistency:
      return "support_consistency";
    case Scenario::precondition_contrast:
      return "precondition_contrast";
  }
  return "heredity_interaction";
}

Matrix ar1_covariance(Index p, double rho) {
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("|rho| must be below 1");
  Matrix cov(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) cov(i, j) = std::pow(rho, std::abs(static_cast<double>(i - j)));
  return cov;
}

Matrix compound_symmetric(Index p, double off) {
  if (!(off > -1.0 / std::max<double>(1.0, static_cast<double>(p - 1)) && off < 1.0))
    throw std::invalid_argument("compound-symmetric parameter out of the SPD range");
  Matrix cov = Matrix::Constant(p, p, off);
  cov.diagonal().setOnes();
  return cov;
}

namespace {

Vector linspace(double lo, double hi, int size) {
  Vector grid(size);
  for (int k = 0; k < size; ++k)
    grid[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(size - 1);
  return grid;
}

/// Permutation-invariant mean: summation in sorted order.
double sorted_mean(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

Vector reduce_mean(const std::vector<Vector>& rows) {
  if (rows.empty()) return Vector();
  Vector out(rows[0].size());
  std::vector<double> buf(rows.size());
  for (Index k = 0; k < out.size(); ++k) {
    for (std::size_t r = 0; r < rows.size(); ++r) buf[r] = rows[r][k];
    out[k] = sorted_mean(buf);
  }
  return out;
}

Matrix reduce_mean(const std::vector<Matrix>& mats) {
  if (mats.empty()) return Matrix();
  Matrix out(mats[0].rows(), mats[0].cols());
  std::vector<double> buf(mats.size());
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = 0; j < out.cols(); ++j) {
      for (std::size_t r = 0; r < mats.size(); ++r) buf[r] = mats[r](i, j);
      out(i, j) = sorted_mean(buf);
    }
  return out;
}

Matrix random_design(std::mt19937_64& eng, Index n, const Matrix& chol_lower) {
  const Index p = chol_lower.rows();
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix Z(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) Z(i, j) = gauss(eng);
  return Z * chol_lower.transpose();
}

Vector gaussian_response(std::mt19937_64& eng, const Matrix& X, const Vector& beta,
                         double sigma) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector y = X * beta;
  for (Index i = 0; i < y.size(); ++i) y[i] += sigma * gauss(eng);
  return y;
}

Matrix expand_second_order(const Matrix& mains) {
  const Index n = mains.rows();
  Matrix X(n, 9);
  X.col(0) = mains.col(0);
  X.col(1) = mains.col(1);
  X.col(2) = mains.col(2);
  X.col(3) = mains.col(0).cwiseProduct(mains.col(0));
  X.col(4) = mains.col(1).cwiseProduct(mains.col(1));
  X.col(5) = mains.col(2).cwiseProduct(mains.col(2));
  X.col(6) = mains.col(0).cwiseProduct(mains.col(1));
  X.col(7) = mains.col(0).cwiseProduct(mains.col(2));
  X.col(8) = mains.col(1).cwiseProduct(mains.col(2));
  return X;
}

std::vector<std::string> second_order_names() {
  return {"x1", "x2", "x3", "x1sq", "x2sq", "x3sq", "x1x2", "x1x3", "x2x3"};
}

HeredityGraph second_order_strong_graph() {
  std::vector<std::vector<Index>> parents(9);
  parents[3] = {0};
  parents[4] = {1};
  parents[5] = {2};
  parents[6] = {0, 1};
  parents[7] = {0, 2};
  parents[8] = {1, 2};
  return make_heredity_graph(HeredityMode::strong, std::move(parents));
}

std::vector<Index> nonzero_indices(const Vector& beta) {
  std::vector<Index> out;
  for (Index j = 0; j < beta.size(); ++j)
    if (beta[j] != 0.0) out.push_back(j);
  return out;
}

double encompassing_fraction(const Matrix& beta_at, const std::vector<Index>& truth) {
  Index hits = 0;
  for (Index i = 0; i < beta_at.rows(); ++i) {
    bool all = true;
    for (Index j : truth)
      if (!(std::abs(beta_at(i, j)) > kActiveThreshold)) {
        all = false;
        break;
      }
    if (all) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(beta_at.rows());
}

/// Selection counts at one grid level: total selected and wrongly selected.
void selection_counts(const ProjectionEnsemble& ens, Index k, const std::vector<char>& is_true,
                      double& selected, double& wrong) {
  const Matrix& b = ens.beta[static_cast<std::size_t>(k)];
  selected = 0.0;
  wrong = 0.0;
  for (Index i = 0; i < b.rows(); ++i)
    for (Index j = 0; j < b.cols(); ++j)
      if (std::abs(b(i, j)) > kActiveThreshold) {
        selected += 1.0;
        if (!is_true[static_cast<std::size_t>(j)]) wrong += 1.0;
      }
}

}  // namespace

SimConfig apply_defaults(SimConfig c) {
  switch (c.scenario) {
    case Scenario::heredity_interaction:
      if (c.replicates <= 0) c.replicates = 100;
      if (c.n <= 0) c.n = 50;
      c.p = 9;
      if (c.beta_true.size() == 0) {
        c.beta_true = Vector::Zero(9);
        c.beta_true[0] = 3.0;
        c.beta_true[1] = 2.0;
        c.beta_true[6] = 1.5;
      }
      if (!(c.sigma > 0.0)) c.sigma = 3.0;
      if (c.draws <= 0) c.draws = 1000;
      if (c.burn_in < 0) c.burn_in = 0;
      if (c.seed == 0) c.seed = 7021;
      if (c.lambda_grid.size() == 0) c.lambda_grid = linspace(0.0, 9.0, 100);
      break;
    case Scenario::large_p_example1:
    case Scenario::large_p_example2:
    case Scenario::precondition_contrast:
      if (c.replicates <= 0)
        c.replicates = c.scenario == Scenario::precondition_contrast ? 1 : 100;
      if (c.n <= 0) c.n = 20;
      if (c.p <= 0) c.p = 40;
      if (c.beta_true.size() == 0) {
        c.beta_true = Vector::Zero(c.p);
        if (c.scenario == Scenario::large_p_example2) {
          for (Index j = 0; j < 5 && j < c.p; ++j) c.beta_true[j] = 4.0;
        } else {
          for (Index j = 10; j < 20 && j < c.p; ++j) c.beta_true[j] = 2.0;
          for (Index j = 30; j < 40 && j < c.p; ++j) c.beta_true[j] = 2.0;
        }
      }
      if (!(c.sigma > 0.0)) c.sigma = 5.0;
      if (c.draws <= 0) c.draws = 1000;
      if (c.burn_in < 0) c.burn_in = 1000;
      if (c.seed == 0)
        c.seed = c.scenario == Scenario::large_p_example1   ? 40011
                 : c.scenario == Scenario::large_p_example2 ? 40022
                                                            : 60001;
      if (c.lambda_grid.size() == 0) c.lambda_grid = linspace(0.0, static_cast<double>(c.p), 100);
      break;
    case Scenario::support_consistency:
      if (c.replicates <= 0) c.replicates = 30;
      c.p = 4;
      if (c.beta_true.size() == 0) {
        c.beta_true = Vector::Zero(4);
        c.beta_true[0] = 1.2;
        c.beta_true[1] = -0.8;
        c.beta_true[2] = 0.6;
      }
      if (c.draws <= 0) c.draws = 400;
      if (c.burn_in < 0) c.burn_in = 500;
      if (c.seed == 0) c.seed = 11;
      if (c.ladder.empty()) c.ladder = {50, 200, 800, 3200};
      break;
  }
  return c;
}

std::pair<SimMetrics, SimMetrics> run_heredity_sim(const SimConfig& raw) {
  const SimConfig c = apply_defaults(raw);
  if (c.scenario != Scenario::heredity_interaction)
    throw std::invalid_argument("run_heredity_sim needs the heredity_interaction scenario");
  const Index g = c.lambda_grid.size();
  const Matrix cov = ar1_covariance(3, c.rho);
  const Matrix chol = Eigen::LLT<Matrix>(cov).matrixL();
  const std::vector<Index> truth = nonzero_indices(c.beta_true);
  const HeredityGraph strong = second_order_strong_graph();
  const HeredityGraph none;

  struct RepOut {
    Vector size_s, loss_s, enc_s, size_u, loss_u, enc_u;
  };
  std::vector<RepOut> reps(static_cast<std::size_t>(c.replicates));

  parallel_for(c.replicates, c.workers, [&](Index rep) {
    auto data_eng = make_engine(derive_seed(c.seed, 2 * static_cast<std::uint64_t>(rep)));
    const Matrix X = expand_second_order(random_design(data_eng, c.n, chol));
    const Vector y = gaussian_response(data_eng, X, c.beta_true, c.sigma);
    const Dataset ds = make_dataset(X, y, Family{FamilyKind::gaussian}, Vector(),
                                    second_order_names(), {});
    const PosteriorSample sample = sample_gaussian_noninformative(
        ds, c.draws, derive_seed(c.seed, 2 * static_cast<std::uint64_t>(rep) + 1));

    RepOut& out = reps[static_cast<std::size_t>(rep)];
    for (int mode = 0; mode < 2; ++mode) {
      ConstraintSpec spec;
      spec.kind = SubspaceKind::garotte;
      spec.heredity = mode == 0 ? strong : none;
      const ProjectionEnsemble ens = project_sample(ds, sample, spec, c.lambda_grid, 1);
      Vector size(g), loss(g), enc(g);
      for (Index k = 0; k < g; ++k) {
        size[k] = ens.sizes_at(k).mean();
        loss[k] = explanatory_loss(ens, c.lambda_grid[k]);
        enc[k] = encompassing_fraction(ens.beta[static_cast<std::size_t>(k)], truth);
      }
      if (mode == 0) {
        out.size_s = size;
        out.loss_s = loss;
        out.enc_s = enc;
      } else {
        out.size_u = size;
        out.loss_u = loss;
        out.enc_u = enc;
      }
    }
  });

  SimMetrics strong_metrics, unconstrained;
  strong_metrics.lambda_grid = c.lambda_grid;
  unconstrained.lambda_grid = c.lambda_grid;
  std::vector<Vector> buf;
  auto collect = [&](auto member) {
    buf.clear();
    for (const RepOut& r : reps) buf.push_back(r.*member);
    return reduce_mean(buf);
  };
  strong_metrics.expected_size = collect(&RepOut::size_s);
  strong_metrics.loss = collect(&RepOut::loss_s);
  strong_metrics.encompassing = collect(&RepOut::enc_s);
  unconstrained.expected_size = collect(&RepOut::size_u);
  unconstrained.loss = collect(&RepOut::loss_u);
  unconstrained.encompassing = collect(&RepOut::enc_u);
  return {strong_metrics, unconstrained};
}

namespace {

struct SelectionRep {
  Vector size, loss, selected, wrong;
  Matrix inclusion;
  char separation = 0;
};

/// Shared large-p replicate body: shrinkage posterior, adaptive projections,
/// selection bookkeeping against the true support.
SelectionRep selection_replicate(const SimConfig& c, Index rep, const Matrix& chol,
                                 const std::vector<char>& is_true, bool plugin,
                                 bool want_inclusion) {
  auto data_eng = make_engine(derive_seed(c.seed, 2 * static_cast<std::uint64_t>(rep)));
  const Matrix X = random_design(data_eng, c.n, chol);
  const Vector y = gaussian_response(data_eng, X, c.beta_true, c.sigma);
  const Dataset ds = make_dataset(X, y, Family{FamilyKind::gaussian});

  PriorSpec prior;
  prior.kind = PriorKind::bayesian_lasso;
  PosteriorSample sample = sample_bayesian_lasso(
      ds, prior, c.burn_in, c.draws, derive_seed(c.seed, 2 * static_cast<std::uint64_t>(rep) + 1));
  if (plugin) {
    Matrix mean_draw = sample.draws.colwise().mean();
    Vector mean_phi = Vector::Constant(1, sample.phi_draws.mean());
    sample.draws = mean_draw;
    sample.phi_draws = mean_phi;
  }

  ConstraintSpec spec;
  spec.kind = SubspaceKind::adaptive_lasso;
  const ProjectionEnsemble ens = project_sample(ds, sample, spec, c.lambda_grid, 1);

  const Index g = c.lambda_grid.size();
  SelectionRep out;
  out.size.resize(g);
  out.loss.resize(g);
  out.selected.resize(g);
  out.wrong.resize(g);
  if (want_inclusion) out.inclusion.resize(g, ds.p());
  for (Index k = 0; k < g; ++k) {
    out.size[k] = ens.sizes_at(k).mean();
    out.loss[k] = explanatory_loss(ens, c.lambda_grid[k]);
    selection_counts(ens, k, is_true, out.selected[k], out.wrong[k]);
    if (want_inclusion)
      out.inclusion.row(k) = inclusion_probabilities(ens, c.lambda_grid[k]).transpose();
  }

  try {
    const double lam = calibrate_lambda(ens, CalibrationMode::loss_bound, 0.2);
    const Vector incl = inclusion_probabilities(ens, lam);
    double active_mean = 0.0, inactive_mean = 0.0;
    Index actives = 0, inactives = 0;
    for (Index j = 0; j < incl.size(); ++j) {
      if (is_true[static_cast<std::size_t>(j)]) {
        active_mean += incl[j];
        ++actives;
      } else {
        inactive_mean += incl[j];
        ++inactives;
      }
    }
    if (actives > 0) active_mean /= static_cast<double>(actives);
    if (inactives > 0) inactive_mean /= static_cast<double>(inactives);
    out.separation = active_mean > inactive_mean ? 1 : 0;
  } catch (const std::exception&) {
    out.separation = 0;
  }
  return out;
}

SimMetrics reduce_selection(const SimConfig& c, const std::vector<SelectionRep>& reps,
                            bool want_inclusion) {
  const Index g = c.lambda_grid.size();
  SimMetrics m;
  m.lambda_grid = c.lambda_grid;
  std::vector<Vector> buf;
  for (const SelectionRep& r : reps) buf.push_back(r.size);
  m.expected_size = reduce_mean(buf);
  buf.clear();
  for (const SelectionRep& r : reps) buf.push_back(r.loss);
  m.loss = reduce_mean(buf);

  m.fdr.resize(g);
  m.fdr_degenerate.assign(static_cast<std::size_t>(g), 0);
  for (Index k = 0; k < g; ++k) {
    // integer-valued counts, so plain sums are permutation invariant
    double selected = 0.0, wrong = 0.0;
    for (const SelectionRep& r : reps) {
      selected += r.selected[k];
      wrong += r.wrong[k];
    }
    if (selected > 0.0) {
      m.fdr[k] = wrong / selected;
    } else {
      m.fdr[k] = 0.0;
      m.fdr_degenerate[static_cast<std::size_t>(k)] = 1;
    }
  }
  if (want_inclusion) {
    std::vector<Matrix> mats;
    for (const SelectionRep& r : reps) mats.push_back(r.inclusion);
    m.inclusion = reduce_mean(mats);
  }
  m.replicate_separation.reserve(reps.size());
  for (const SelectionRep& r : reps) m.replicate_separation.push_back(r.separation);
  return m;
}

}  // namespace

SimMetrics run_large_p_sim(const SimConfig& raw) {
  const SimConfig c = apply_defaults(raw);
  if (c.scenario != Scenario::large_p_example1 && c.scenario != Scenario::large_p_example2)
    throw std::invalid_argument("run_large_p_sim needs one of the large-p scenarios");
  const Matrix cov = c.scenario == Scenario::large_p_example2 ? compound_symmetric(c.p, 0.5)
                                                              : Matrix::Identity(c.p, c.p);
  const Matrix chol = Eigen::LLT<Matrix>(cov).matrixL();
  const std::vector<Index> truth = nonzero_indices(c.beta_true);
  std::vector<char> is_true(static_cast<std::size_t>(c.p), 0);
  for (Index j : truth) is_true[static_cast<std::size_t>(j)] = 1;

  std::vector<SelectionRep> reps(static_cast<std::size_t>(c.replicates));
  parallel_for(c.replicates, c.workers, [&](Index rep) {
    reps[static_cast<std::size_t>(rep)] = selection_replicate(c, rep, chol, is_true, false, false);
  });
  return reduce_selection(c, reps, false);
}

SimMetrics run_consistency_check(const SimConfig& raw) {
  const SimConfig c = apply_defaults(raw);
  if (c.scenario != Scenario::support_consistency)
    throw std::invalid_argument("run_consistency_check needs the support_consistency scenario");
  const Index rungs = static_cast<Index>(c.ladder.size());
  const Index reps = c.replicates;

  std::vector<std::vector<double>> frac(static_cast<std::size_t>(rungs),
                                        std::vector<double>(static_cast<std::size_t>(reps), 0.0));
  std::vector<std::vector<double>> modal = frac;
  parallel_for(rungs * reps, c.workers, [&](Index task) {
    const Index r = task / reps;
    const Index rep = task % reps;
    const Index n = c.ladder[static_cast<std::size_t>(r)];
    const std::uint64_t base = 10000 * static_cast<std::uint64_t>(r);
    auto data_eng = make_engine(derive_seed(c.seed, base + 2 * static_cast<std::uint64_t>(rep)));

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix X(n, c.p);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < c.p; ++j) X(i, j) = gauss(data_eng);
    Vector y(n);
    const Vector eta0 = X * c.beta_true;
    for (Index i = 0; i < n; ++i)
      y[i] = unif(data_eng) < 1.0 / (1.0 + std::exp(-eta0[i])) ? 1.0 : 0.0;
    const Dataset ds = make_dataset(X, y, Family{FamilyKind::binomial});

    PriorSpec prior;
    prior.kind = PriorKind::logistic_normal;
    // thinned so the modal pattern rests on near-independent draws
    const PosteriorSample sample = sample_logistic_normal(
        ds, prior, c.burn_in, c.draws,
        derive_seed(c.seed, base + 2 * static_cast<std::uint64_t>(rep) + 1), 5);

    double gamma_n = 0.0;
    if (c.growth == PenaltyGrowth::fourth_root)
      gamma_n = std::pow(static_cast<double>(n), 0.25);
    else if (c.growth == PenaltyGrowth::linear)
      gamma_n = static_cast<double>(n);

    const Vector ones = Vector::Ones(n);
    std::size_t truth = 0;
    for (Index j = 0; j < c.p; ++j)
      if (c.beta_true[j] != 0.0) truth |= std::size_t{1} << j;
    std::unordered_map<std::size_t, Index> pattern_counts;
    for (Index i = 0; i < sample.draws.rows(); ++i) {
      const Vector beta_d = sample.draws.row(i).transpose();
      const Vector mu_d = mean_from_eta(FamilyKind::binomial, X * beta_d);
      const PenaltySpec penalty = adaptive_penalty(beta_d, ds.penalized);
      const Vector proj = glm_penalized_solve(X, mu_d, ones, FamilyKind::binomial, penalty,
                                              gamma_n, beta_d);
      std::size_t pattern = 0;
      for (Index j = 0; j < c.p; ++j)
        if (std::abs(proj[j]) > kActiveThreshold) pattern |= std::size_t{1} << j;
      ++pattern_counts[pattern];
    }
    Index truth_count = 0, top_count = 0;
    int top_ties = 0;
    for (const auto& [pattern, count] : pattern_counts) {
      if (pattern == truth) truth_count = count;
      if (count > top_count) {
        top_count = count;
        top_ties = 1;
      } else if (count == top_count) {
        ++top_ties;
      }
    }
    const bool truth_is_top = truth_count == top_count && top_ties == 1;
    modal[static_cast<std::size_t>(r)][static_cast<std::size_t>(rep)] = truth_is_top ? 1.0 : 0.0;
    frac[static_cast<std::size_t>(r)][static_cast<std::size_t>(rep)] =
        static_cast<double>(truth_count) / static_cast<double>(sample.draws.rows());
  });

  SimMetrics m;
  m.ladder_n.resize(rungs);
  m.recovery.resize(rungs);
  m.recovery_draws.resize(rungs);
  for (Index r = 0; r < rungs; ++r) {
    m.ladder_n[r] = static_cast<double>(c.ladder[static_cast<std::size_t>(r)]);
    m.recovery[r] = sorted_mean(modal[static_cast<std::size_t>(r)]);
    m.recovery_draws[r] = sorted_mean(frac[static_cast<std::size_t>(r)]);
  }
  return m;
}

std::pair<SimMetrics, SimMetrics> run_preconditioning_contrast(const SimConfig& raw) {
  const SimConfig c = apply_defaults(raw);
  if (c.scenario != Scenario::precondition_contrast)
    throw std::invalid_argument(
        "run_preconditioning_contrast needs the precondition_contrast scenario");
  const Matrix chol = Matrix::Identity(c.p, c.p);
  const std::vector<Index> truth = nonzero_indices(c.beta_true);
  std::vector<char> is_true(static_cast<std::size_t>(c.p), 0);
  for (Index j : truth) is_true[static_cast<std::size_t>(j)] = 1;

  std::vector<SelectionRep> ens_reps(static_cast<std::size_t>(c.replicates));
  std::vector<SelectionRep> plug_reps(static_cast<std::size_t>(c.replicates));
  parallel_for(c.replicates, c.workers, [&](Index rep) {
    ens_reps[static_cast<std::size_t>(rep)] =
        selection_replicate(c, rep, chol, is_true, false, true);
    plug_reps[static_cast<std::size_t>(rep)] =
        selection_replicate(c, rep, chol, is_true, true, true);
  });
  return {reduce_selection(c, ens_reps, true), reduce_selection(c, plug_reps, true)};
}

}  // namespace klproj
