#include "klproj/run.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "klproj/experiments.hpp"
#include "klproj/io.hpp"
#include "klproj/model_space.hpp"

namespace klproj {

namespace {

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    size_t a = cur.find_first_not_of(" \t");
    size_t b = cur.find_last_not_of(" \t");
    out.push_back(a == std::string::npos ? "" : cur.substr(a, b - a + 1));
  }
  return out;
}

double parse_double(const std::string& key, const std::string& s) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config " + key + ": bad number '" + s + "'");
  }
}

long long parse_int(const std::string& key, const std::string& s) {
  try {
    size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config " + key + ": bad integer '" + s + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& s) {
  try {
    size_t used = 0;
    unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config " + key + ": bad unsigned integer '" + s + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no") return false;
  throw std::runtime_error("config " + key + ": bad flag '" + s + "' (use 0/1)");
}

Vector parse_grid(const std::string& key, const std::string& s) {
  auto parts = split_list(s, ',');
  Vector g(static_cast<Index>(parts.size()));
  for (size_t i = 0; i < parts.size(); ++i)
    g(static_cast<Index>(i)) = parse_double(key, parts[i]);
  return g;
}

HeredityGraph heredity_from(const RunConfig& cfg, Index p) {
  HeredityGraph graph;
  graph.mode = parse_heredity(cfg.heredity_mode);
  graph.parents.assign(static_cast<size_t>(p), {});
  if (!cfg.heredity_parents.empty()) {
    for (const auto& entry : split_list(cfg.heredity_parents, ';')) {
      if (entry.empty()) continue;
      size_t colon = entry.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("heredity parents: expected child:parents in '" + entry + "'");
      long long child = parse_int("project.heredity_parents", entry.substr(0, colon));
      if (child < 0 || child >= p)
        throw std::runtime_error("heredity parents: child index out of range in '" + entry + "'");
      for (const auto& ps : split_list(entry.substr(colon + 1), ',')) {
        long long parent = parse_int("project.heredity_parents", ps);
        graph.parents[static_cast<size_t>(child)].push_back(static_cast<Index>(parent));
      }
    }
  }
  return make_heredity_graph(graph.mode, graph.parents);
}

ConstraintSpec constraint_from(const RunConfig& cfg, Index p) {
  ConstraintSpec spec;
  spec.kind = parse_subspace(cfg.subspace);
  spec.gamma_ridge = cfg.gamma_ridge;
  spec.glm_grid_size = std::max(cfg.grid_size, 2);
  if (spec.kind == SubspaceKind::garotte) spec.heredity = heredity_from(cfg, p);
  return spec;
}

Vector grid_from(const RunConfig& cfg, const Dataset& ds, const PosteriorSample& sample,
                 const ConstraintSpec& spec) {
  if (!cfg.lambda_grid.empty()) return parse_grid("project.grid", cfg.lambda_grid);
  return default_lambda_grid(ds, sample, spec, cfg.grid_size);
}

/// Level for models/predict: explicit lambda snaps to the nearest grid point,
/// otherwise one of the calibration rules picks it.
double choose_level(const RunConfig& cfg, const ProjectionEnsemble& ens) {
  if (cfg.lambda_at >= 0.0) {
    Index best = 0;
    for (Index g = 1; g < ens.grid_size(); ++g)
      if (std::abs(ens.lambda_grid(g) - cfg.lambda_at) <
          std::abs(ens.lambda_grid(best) - cfg.lambda_at))
        best = g;
    return ens.lambda_grid(best);
  }
  if (cfg.loss_bound > 0.0)
    return calibrate_lambda(ens, CalibrationMode::loss_bound, cfg.loss_bound);
  if (cfg.target_size >= 0.0)
    return calibrate_lambda(ens, CalibrationMode::target_size, cfg.target_size);
  throw std::runtime_error(
      "no constraint level chosen: set project.lambda, project.loss_bound or "
      "project.target_size");
}

std::filesystem::path out_file(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return std::filesystem::path(cfg.out_dir) / name;
}

OutTable stamped(const RunConfig& cfg) {
  OutTable t;
  t.seed = cfg.seed;
  t.config_hash = config_digest(cfg);
  return t;
}

void write_exclusions(const RunConfig& cfg, const ProjectionEnsemble& ens) {
  if (ens.excluded_draws.empty()) return;
  OutTable t = stamped(cfg);
  t.columns = {"draw"};
  t.values.resize(static_cast<Index>(ens.excluded_draws.size()), 1);
  for (size_t i = 0; i < ens.excluded_draws.size(); ++i) {
    t.values(static_cast<Index>(i), 0) = static_cast<double>(ens.excluded_draws[i]);
    t.notes.push_back("draw " + std::to_string(ens.excluded_draws[i]) + ": " +
                      ens.exclusion_reasons[i]);
  }
  write_table(out_file(cfg, "exclusions.tsv").string(), t);
}

struct Prepared {
  Dataset ds;
  PosteriorSample sample;
  ConstraintSpec spec;
  ProjectionEnsemble ens;
};

Prepared prepare_ensemble(const RunConfig& cfg) {
  Prepared prep{load_run_dataset(cfg), {}, {}, {}};
  if (cfg.sample_path.empty())
    throw std::runtime_error("no posterior sample: set io.sample to a draws table from fit");
  prep.sample = load_sample(cfg.sample_path, prep.ds);
  prep.spec = constraint_from(cfg, prep.ds.p());
  Vector grid = grid_from(cfg, prep.ds, prep.sample, prep.spec);
  prep.ens = project_sample(prep.ds, prep.sample, prep.spec, grid, cfg.workers);
  return prep;
}

}  // namespace

std::map<std::string, std::string> config_map(const RunConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["data.path"] = cfg.data_path;
  kv["data.response"] = cfg.response;
  kv["data.covariates"] = cfg.covariates;
  kv["data.family"] = cfg.family;
  kv["data.intercept"] = cfg.intercept ? "1" : "0";
  kv["data.standardize"] = cfg.standardize_data ? "1" : "0";
  kv["prior.kind"] = cfg.prior;
  kv["prior.variance"] = format_double(cfg.prior_variance);
  kv["prior.lambda_bl"] = format_double(cfg.lambda_bl);
  kv["sampler.burn_in"] = std::to_string(cfg.burn_in);
  kv["sampler.draws"] = std::to_string(cfg.draws);
  kv["sampler.thin"] = std::to_string(cfg.thin);
  kv["sampler.seed"] = std::to_string(cfg.seed);
  kv["project.subspace"] = cfg.subspace;
  kv["project.gamma_ridge"] = format_double(cfg.gamma_ridge);
  kv["project.heredity_mode"] = cfg.heredity_mode;
  kv["project.heredity_parents"] = cfg.heredity_parents;
  kv["project.grid_size"] = std::to_string(cfg.grid_size);
  kv["project.grid"] = cfg.lambda_grid;
  kv["project.lambda"] = format_double(cfg.lambda_at);
  kv["project.loss_bound"] = format_double(cfg.loss_bound);
  kv["project.target_size"] = format_double(cfg.target_size);
  kv["project.pooling"] = cfg.pooling;
  kv["project.top_models"] = std::to_string(cfg.top_models);
  kv["project.methods"] = cfg.methods;
  kv["io.sample"] = cfg.sample_path;
  kv["io.newdata"] = cfg.newdata_path;
  kv["io.out_dir"] = cfg.out_dir;
  kv["run.workers"] = std::to_string(cfg.workers);
  kv["sim.scenario"] = cfg.scenario;
  kv["sim.replicates"] = std::to_string(cfg.replicates);
  kv["sim.rho"] = format_double(cfg.rho);
  kv["sim.seed"] = std::to_string(cfg.sim_seed);
  return kv;
}

std::uint64_t config_digest(const RunConfig& cfg) { return hash_config(config_map(cfg)); }

void apply_config_map(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "data.path") cfg.data_path = value;
    else if (key == "data.response") cfg.response = value;
    else if (key == "data.covariates") cfg.covariates = value;
    else if (key == "data.family") cfg.family = value;
    else if (key == "data.intercept") cfg.intercept = parse_bool(key, value);
    else if (key == "data.standardize") cfg.standardize_data = parse_bool(key, value);
    else if (key == "prior.kind") cfg.prior = value;
    else if (key == "prior.variance") cfg.prior_variance = parse_double(key, value);
    else if (key == "prior.lambda_bl") cfg.lambda_bl = parse_double(key, value);
    else if (key == "sampler.burn_in") cfg.burn_in = static_cast<int>(parse_int(key, value));
    else if (key == "sampler.draws") cfg.draws = static_cast<int>(parse_int(key, value));
    else if (key == "sampler.thin") cfg.thin = static_cast<int>(parse_int(key, value));
    else if (key == "sampler.seed") cfg.seed = parse_u64(key, value);
    else if (key == "project.subspace") cfg.subspace = value;
    else if (key == "project.gamma_ridge") cfg.gamma_ridge = parse_double(key, value);
    else if (key == "project.heredity_mode") cfg.heredity_mode = value;
    else if (key == "project.heredity_parents") cfg.heredity_parents = value;
    else if (key == "project.grid_size") cfg.grid_size = static_cast<int>(parse_int(key, value));
    else if (key == "project.grid") cfg.lambda_grid = value;
    else if (key == "project.lambda") cfg.lambda_at = parse_double(key, value);
    else if (key == "project.loss_bound") cfg.loss_bound = parse_double(key, value);
    else if (key == "project.target_size") cfg.target_size = parse_double(key, value);
    else if (key == "project.pooling") cfg.pooling = value;
    else if (key == "project.top_models") cfg.top_models = static_cast<int>(parse_int(key, value));
    else if (key == "project.methods") cfg.methods = value;
    else if (key == "io.sample") cfg.sample_path = value;
    else if (key == "io.newdata") cfg.newdata_path = value;
    else if (key == "io.out_dir") cfg.out_dir = value;
    else if (key == "run.workers") cfg.workers = static_cast<int>(parse_int(key, value));
    else if (key == "sim.scenario") cfg.scenario = value;
    else if (key == "sim.replicates") cfg.replicates = static_cast<int>(parse_int(key, value));
    else if (key == "sim.rho") cfg.rho = parse_double(key, value);
    else if (key == "sim.seed") cfg.sim_seed = parse_u64(key, value);
    else throw std::runtime_error("unknown config key: " + key);
  }
}

Dataset load_run_dataset(const RunConfig& cfg) {
  if (cfg.data_path.empty()) throw std::runtime_error("no data file: set data.path");
  if (cfg.response.empty()) throw std::runtime_error("no response column: set data.response");
  Table t = read_delimited(cfg.data_path);
  auto col = [&](const std::string& name) -> Index {
    for (size_t j = 0; j < t.names.size(); ++j)
      if (t.names[j] == name) return static_cast<Index>(j);
    std::string have;
    for (const auto& n : t.names) have += (have.empty() ? "" : ", ") + n;
    throw std::runtime_error(cfg.data_path + ": no column '" + name + "' (have: " + have + ")");
  };
  Index yj = col(cfg.response);
  std::vector<std::string> names;
  if (cfg.covariates.empty()) {
    for (size_t j = 0; j < t.names.size(); ++j)
      if (static_cast<Index>(j) != yj) names.push_back(t.names[j]);
  } else {
    names = split_list(cfg.covariates, ',');
  }
  Matrix X(t.values.rows(), static_cast<Index>(names.size()));
  for (size_t j = 0; j < names.size(); ++j) X.col(static_cast<Index>(j)) = t.values.col(col(names[j]));
  Dataset ds = make_dataset(std::move(X), t.values.col(yj), Family::parse(cfg.family), Vector(),
                            names);
  if (cfg.standardize_data) standardize(ds);
  if (cfg.intercept) add_intercept(ds);
  return ds;
}

PosteriorSample load_sample(const std::string& path, const Dataset& ds) {
  OutTable t = read_table(path);
  Index p = ds.p();
  if (static_cast<Index>(t.columns.size()) != p + 1 || t.columns.back() != "(phi)")
    throw std::runtime_error(path + ": expected " + std::to_string(p) +
                             " coefficient columns plus '(phi)'");
  for (Index j = 0; j < p; ++j)
    if (t.columns[static_cast<size_t>(j)] != ds.names[static_cast<size_t>(j)])
      throw std::runtime_error(path + ": column '" + t.columns[static_cast<size_t>(j)] +
                               "' does not match design column '" +
                               ds.names[static_cast<size_t>(j)] + "'");
  if (t.values.rows() == 0) throw std::runtime_error(path + ": no draws");
  PosteriorSample sample;
  sample.draws = t.values.leftCols(p);
  sample.phi_draws = t.values.col(p);
  sample.diagnostics.seed = t.seed;
  return sample;
}

void run_fit(const RunConfig& cfg) {
  Dataset ds = load_run_dataset(cfg);
  std::string prior = cfg.prior;
  if (prior.empty())
    prior = ds.family.kind == FamilyKind::gaussian ? "conjugate" : "logistic_normal";
  PosteriorSample sample;
  if (prior == "conjugate") {
    if (ds.family.kind != FamilyKind::gaussian)
      throw std::runtime_error("prior.kind=conjugate needs data.family=gaussian");
    sample = sample_gaussian_noninformative(ds, cfg.draws, cfg.seed);
  } else if (prior == "logistic_normal") {
    if (ds.family.kind != FamilyKind::binomial)
      throw std::runtime_error("prior.kind=logistic_normal needs data.family=binomial");
    PriorSpec spec;
    spec.kind = PriorKind::logistic_normal;
    spec.v = cfg.prior_variance;
    sample = sample_logistic_normal(ds, spec, cfg.burn_in, cfg.draws, cfg.seed, cfg.thin);
  } else if (prior == "bayesian_lasso") {
    if (ds.family.kind != FamilyKind::gaussian)
      throw std::runtime_error("prior.kind=bayesian_lasso needs data.family=gaussian");
    PriorSpec spec;
    spec.kind = PriorKind::bayesian_lasso;
    spec.lambda_bl = cfg.lambda_bl;
    sample = sample_bayesian_lasso(ds, spec, cfg.burn_in, cfg.draws, cfg.seed, cfg.thin);
  } else {
    throw std::runtime_error("unknown prior.kind '" + prior +
                             "' (conjugate, logistic_normal, bayesian_lasso)");
  }

  OutTable draws = stamped(cfg);
  draws.columns = ds.names;
  draws.columns.push_back("(phi)");
  draws.values.resize(sample.draws.rows(), ds.p() + 1);
  draws.values.leftCols(ds.p()) = sample.draws;
  draws.values.col(ds.p()) = sample.phi_draws;
  draws.notes.push_back("family=" + cfg.family + " prior=" + prior);
  write_table(out_file(cfg, "draws.tsv").string(), draws);

  OutTable diag = stamped(cfg);
  diag.columns = {"acceptance", "seed", "burn_in", "thin", "underflow_count"};
  diag.values.resize(1, 5);
  diag.values << sample.diagnostics.acceptance, static_cast<double>(sample.diagnostics.seed),
      static_cast<double>(sample.diagnostics.burn_in), static_cast<double>(sample.diagnostics.thin),
      static_cast<double>(sample.diagnostics.underflow_count);
  write_table(out_file(cfg, "diagnostics.tsv").string(), diag);
}

void run_project(const RunConfig& cfg) {
  Prepared prep = prepare_ensemble(cfg);
  const ProjectionEnsemble& ens = prep.ens;
  Index g = ens.grid_size();

  OutTable curve = stamped(cfg);
  curve.columns = {"lambda", "expected_size", "loss"};
  curve.values.resize(g, 3);
  for (Index k = 0; k < g; ++k) {
    double lam = ens.lambda_grid(k);
    curve.values(k, 0) = lam;
    curve.values(k, 1) = expected_model_size(ens, lam);
    curve.values(k, 2) = explanatory_loss(ens, lam);
  }
  write_table(out_file(cfg, "curve.tsv").string(), curve);

  OutTable incl = stamped(cfg);
  incl.columns = {"lambda"};
  for (const auto& n : ens.names) incl.columns.push_back(n);
  incl.values.resize(g, 1 + static_cast<Index>(ens.names.size()));
  for (Index k = 0; k < g; ++k) {
    incl.values(k, 0) = ens.lambda_grid(k);
    incl.values.row(k).tail(static_cast<Index>(ens.names.size())) =
        inclusion_probabilities(ens, ens.lambda_grid(k)).transpose();
  }
  write_table(out_file(cfg, "inclusion.tsv").string(), incl);

  write_exclusions(cfg, ens);

  if (cfg.lambda_at >= 0.0 || cfg.loss_bound > 0.0 || cfg.target_size >= 0.0) {
    double lam = choose_level(cfg, ens);
    OutTable cal = stamped(cfg);
    cal.columns = {"lambda", "expected_size", "loss"};
    cal.values.resize(1, 3);
    cal.values << lam, expected_model_size(ens, lam), explanatory_loss(ens, lam);
    write_table(out_file(cfg, "calibration.tsv").string(), cal);
  }
}

void run_models(const RunConfig& cfg) {
  Prepared prep = prepare_ensemble(cfg);
  const ProjectionEnsemble& ens = prep.ens;

  ModelTable table;
  if (cfg.pooling == "along_path") {
    table = model_frequencies(ens, Pooling::along_path);
  } else if (cfg.pooling == "at_lambda") {
    table = model_frequencies(ens, Pooling::at_lambda, choose_level(cfg, ens));
  } else {
    throw std::runtime_error("unknown project.pooling '" + cfg.pooling +
                             "' (along_path, at_lambda)");
  }

  std::vector<Index> pen_cols;
  for (Index j = 0; j < prep.ds.p(); ++j)
    if (ens.penalized[static_cast<size_t>(j)]) pen_cols.push_back(j);

  OutTable out = stamped(cfg);
  out.columns = {"size", "count", "freq", "freq_within_size"};
  for (Index j : pen_cols) out.columns.push_back(ens.names[static_cast<size_t>(j)]);
  out.notes.push_back("pooling=" + table.provenance +
                      " total=" + std::to_string(table.total));

  std::vector<const ModelRow*> kept;
  Index last_size = -1;
  int in_size = 0;
  for (const auto& row : table.rows) {
    if (row.id.count() != last_size) {
      last_size = row.id.count();
      in_size = 0;
    }
    if (in_size++ < cfg.top_models) kept.push_back(&row);
  }
  out.values.resize(static_cast<Index>(kept.size()), static_cast<Index>(out.columns.size()));
  for (size_t i = 0; i < kept.size(); ++i) {
    const ModelRow& row = *kept[i];
    Index r = static_cast<Index>(i);
    out.values(r, 0) = static_cast<double>(row.id.count());
    out.values(r, 1) = static_cast<double>(row.count);
    out.values(r, 2) = row.freq;
    out.values(r, 3) = row.freq_within_size;
    for (size_t j = 0; j < pen_cols.size(); ++j)
      out.values(r, 4 + static_cast<Index>(j)) = row.id.contains(pen_cols[j]) ? 1.0 : 0.0;
  }
  write_table(out_file(cfg, "models.tsv").string(), out);
}

void run_loss_curve(const RunConfig& cfg) {
  Dataset ds = load_run_dataset(cfg);
  if (cfg.sample_path.empty())
    throw std::runtime_error("no posterior sample: set io.sample to a draws table from fit");
  PosteriorSample sample = load_sample(cfg.sample_path, ds);

  auto methods = split_list(cfg.methods, ',');
  if (methods.empty()) throw std::runtime_error("project.methods is empty");

  OutTable out = stamped(cfg);
  out.columns = {"method", "lambda", "expected_size", "loss"};
  std::vector<Matrix> blocks;
  Index rows = 0;
  for (size_t m = 0; m < methods.size(); ++m) {
    RunConfig sub = cfg;
    sub.subspace = methods[m];
    ConstraintSpec spec = constraint_from(sub, ds.p());
    Vector grid = grid_from(cfg, ds, sample, spec);
    ProjectionEnsemble ens = project_sample(ds, sample, spec, grid, cfg.workers);
    Matrix block(ens.grid_size(), 4);
    for (Index k = 0; k < ens.grid_size(); ++k) {
      double lam = ens.lambda_grid(k);
      block(k, 0) = static_cast<double>(m);
      block(k, 1) = lam;
      block(k, 2) = expected_model_size(ens, lam);
      block(k, 3) = explanatory_loss(ens, lam);
    }
    out.notes.push_back("method " + std::to_string(m) + "=" + methods[m]);
    rows += block.rows();
    blocks.push_back(std::move(block));
  }
  out.values.resize(rows, 4);
  Index at = 0;
  for (const auto& block : blocks) {
    out.values.middleRows(at, block.rows()) = block;
    at += block.rows();
  }
  write_table(out_file(cfg, "loss_curve.tsv").string(), out);
}

void run_predict(const RunConfig& cfg) {
  Prepared prep = prepare_ensemble(cfg);
  if (cfg.newdata_path.empty())
    throw std::runtime_error("no new data: set io.newdata to a covariate table");
  Table nd = read_delimited(cfg.newdata_path);
  auto col = [&](const std::string& name) -> Index {
    for (size_t j = 0; j < nd.names.size(); ++j)
      if (nd.names[j] == name) return static_cast<Index>(j);
    throw std::runtime_error(cfg.newdata_path + ": no column '" + name + "'");
  };
  Matrix Xn(nd.values.rows(), prep.ds.p());
  for (Index j = 0; j < prep.ds.p(); ++j) {
    const std::string& name = prep.ds.names[static_cast<size_t>(j)];
    if (name == "(intercept)") {
      Xn.col(j).setOnes();
      continue;
    }
    Xn.col(j) = (nd.values.col(col(name)).array() - prep.ds.center(j)) / prep.ds.scale(j);
  }

  double lam = choose_level(cfg, prep.ens);
  PredictiveMixture mix = predictive_mixture(prep.ens, lam, Xn);
  OutTable out = stamped(cfg);
  out.columns = {"row", "mean", "variance"};
  out.values.resize(Xn.rows(), 3);
  for (Index i = 0; i < Xn.rows(); ++i)
    out.values.row(i) << static_cast<double>(i), mix.mean(i), mix.variance(i);
  out.notes.push_back("lambda=" + format_double(lam));
  write_table(out_file(cfg, "predict.tsv").string(), out);
}

namespace {

void write_sim_curves(const RunConfig& cfg, const std::string& name, const SimMetrics& m,
                      bool with_encompassing, bool with_fdr) {
  OutTable t = stamped(cfg);
  t.seed = cfg.sim_seed;
  t.columns = {"lambda", "expected_size", "loss"};
  if (with_encompassing) t.columns.push_back("encompassing");
  if (with_fdr) {
    t.columns.push_back("fdr");
    t.columns.push_back("fdr_degenerate");
  }
  Index g = m.lambda_grid.size();
  t.values.resize(g, static_cast<Index>(t.columns.size()));
  for (Index k = 0; k < g; ++k) {
    Index c = 0;
    t.values(k, c++) = m.lambda_grid(k);
    t.values(k, c++) = m.expected_size(k);
    t.values(k, c++) = m.loss(k);
    if (with_encompassing) t.values(k, c++) = m.encompassing(k);
    if (with_fdr) {
      t.values(k, c++) = m.fdr(k);
      t.values(k, c++) = m.fdr_degenerate[static_cast<size_t>(k)] ? 1.0 : 0.0;
    }
  }
  write_table(out_file(cfg, name).string(), t);
}

void write_sim_separation(const RunConfig& cfg, const std::string& name, const SimMetrics& m) {
  if (m.replicate_separation.empty()) return;
  OutTable t = stamped(cfg);
  t.seed = cfg.sim_seed;
  t.columns = {"replicate", "separated"};
  t.values.resize(static_cast<Index>(m.replicate_separation.size()), 2);
  for (size_t r = 0; r < m.replicate_separation.size(); ++r)
    t.values.row(static_cast<Index>(r)) << static_cast<double>(r),
        m.replicate_separation[r] ? 1.0 : 0.0;
  write_table(out_file(cfg, name).string(), t);
}

void write_sim_inclusion(const RunConfig& cfg, const std::string& name, const SimMetrics& m) {
  if (m.inclusion.size() == 0) return;
  OutTable t = stamped(cfg);
  t.seed = cfg.sim_seed;
  t.columns = {"lambda"};
  for (Index j = 0; j < m.inclusion.cols(); ++j) t.columns.push_back("x" + std::to_string(j));
  t.values.resize(m.inclusion.rows(), 1 + m.inclusion.cols());
  t.values.col(0) = m.lambda_grid;
  t.values.rightCols(m.inclusion.cols()) = m.inclusion;
  write_table(out_file(cfg, name).string(), t);
}

}  // namespace

void run_simulate(const RunConfig& cfg) {
  SimConfig sim;
  sim.scenario = parse_scenario(cfg.scenario);
  sim.replicates = cfg.replicates;
  sim.rho = cfg.rho;
  sim.seed = cfg.sim_seed;
  sim.workers = cfg.workers;
  if (!cfg.lambda_grid.empty()) sim.lambda_grid = parse_grid("project.grid", cfg.lambda_grid);
  sim = apply_defaults(sim);
  RunConfig stampcfg = cfg;
  stampcfg.sim_seed = sim.seed;

  switch (sim.scenario) {
    case Scenario::heredity_interaction: {
      auto [strong, plain] = run_heredity_sim(sim);
      write_sim_curves(stampcfg, "sim_strong.tsv", strong, true, false);
      write_sim_curves(stampcfg, "sim_unconstrained.tsv", plain, true, false);
      break;
    }
    case Scenario::large_p_example1:
    case Scenario::large_p_example2: {
      SimMetrics m = run_large_p_sim(sim);
      write_sim_curves(stampcfg, "sim_metrics.tsv", m, false, true);
      write_sim_separation(stampcfg, "sim_separation.tsv", m);
      break;
    }
    case Scenario::support_consistency: {
      SimMetrics m = run_consistency_check(sim);
      OutTable t = stamped(stampcfg);
      t.seed = sim.seed;
      t.columns = {"n", "recovery", "recovery_draws"};
      t.values.resize(m.ladder_n.size(), 3);
      t.values.col(0) = m.ladder_n;
      t.values.col(1) = m.recovery;
      t.values.col(2) = m.recovery_draws;
      write_table(out_file(cfg, "sim_recovery.tsv").string(), t);
      break;
    }
    case Scenario::precondition_contrast: {
      auto [ens, plug] = run_preconditioning_contrast(sim);
      write_sim_curves(stampcfg, "sim_ensemble.tsv", ens, false, true);
      write_sim_curves(stampcfg, "sim_plugin.tsv", plug, false, true);
      write_sim_inclusion(stampcfg, "inclusion_ensemble.tsv", ens);
      write_sim_inclusion(stampcfg, "inclusion_plugin.tsv", plug);
      break;
    }
  }
}

}  // namespace klproj
