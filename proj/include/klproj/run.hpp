#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "dataset.hpp"
#include "posterior.hpp"
#include "projection.hpp"

namespace klproj {

/// One CLI invocation's worth of settings.  Everything is a plain scalar or
/// string so the command line and the key=value config file share one
/// representation; the run_* commands parse lists and enums on use.
struct RunConfig {
  // data
  std::string data_path;
  std::string response;
  std::string covariates;  ///< comma list; empty = every non-response column
  std::string family = "gaussian";
  bool intercept = true;
  bool standardize_data = true;

  // prior + sampler
  std::string prior;  ///< empty = family default
  double prior_variance = 3.0;
  double lambda_bl = 10.0;
  int burn_in = 1000;
  int draws = 2000;
  int thin = 1;
  std::uint64_t seed = 20260814;

  // projection
  std::string subspace = "lasso";
  double gamma_ridge = 0.0;
  std::string heredity_mode = "none";
  std::string heredity_parents;  ///< "child:parent,parent;child:parent;..."
  int grid_size = 100;
  std::string lambda_grid;   ///< explicit comma list, overrides grid_size
  double lambda_at = -1.0;   ///< single level for models/predict, < 0 unset
  double loss_bound = 0.0;   ///< calibration target, 0 unset
  double target_size = -1.0; ///< calibration target, < 0 unset
  std::string pooling = "along_path";
  int top_models = 10;
  std::string methods = "lasso,adaptive_lasso";  ///< loss-curve comparands

  // inputs and outputs
  std::string sample_path;
  std::string newdata_path;
  std::string out_dir = ".";
  int workers = 0;

  // simulate
  std::string scenario = "heredity_interaction";
  int replicates = 0;
  double rho = 0.0;
  std::uint64_t sim_seed = 0;  ///< 0 = scenario default
};

/// Canonical key=value view of a config; also the digest input, so two runs
/// agree on config_digest iff every setting matches.
std::map<std::string, std::string> config_map(const RunConfig& cfg);
std::uint64_t config_digest(const RunConfig& cfg);

/// Applies file keys onto cfg.  Unknown keys and unparsable values throw.
void apply_config_map(RunConfig& cfg, const std::map<std::string, std::string>& kv);

/// Reads the delimited data file, assembles the design in config order and
/// applies standardization plus the intercept column.
Dataset load_run_dataset(const RunConfig& cfg);

/// Reloads a draws table written by run_fit, checking the coefficient names
/// against the dataset's columns.
PosteriorSample load_sample(const std::string& path, const Dataset& ds);

/// fit: posterior draws + diagnostics.  project: constraint-grid curves and
/// inclusion probabilities.  models: pooled sparsity-pattern table.
/// loss-curve: per-method loss curves.  predict: mixture mean/variance on new
/// rows.  simulate: bundled scenario metrics.  All write headered TSVs under
/// out_dir.
void run_fit(const RunConfig& cfg);
void run_project(const RunConfig& cfg);
void run_models(const RunConfig& cfg);
void run_loss_curve(const RunConfig& cfg);
void run_predict(const RunConfig& cfg);
void run_simulate(const RunConfig& cfg);

}  // namespace klproj
