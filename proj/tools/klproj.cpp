#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "klproj/io.hpp"
#include "klproj/run.hpp"

namespace {

using klproj::RunConfig;

void add_data_opts(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--data", cfg.data_path, "delimited data file with a header row");
  sub->add_option("--response", cfg.response, "response column name");
  sub->add_option("--covariates", cfg.covariates,
                  "comma separated covariate columns (default: all others)");
  sub->add_option("--family", cfg.family, "gaussian, binomial or poisson");
  sub->add_flag("--intercept,!--no-intercept", cfg.intercept,
                "prepend an unpenalized intercept column");
  sub->add_flag("--standardize,!--no-standardize", cfg.standardize_data,
                "center/scale non-binary covariates");
}

void add_sampler_opts(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--prior", cfg.prior, "conjugate, logistic_normal or bayesian_lasso");
  sub->add_option("--prior-variance", cfg.prior_variance, "normal prior variance (logistic)");
  sub->add_option("--lambda-bl", cfg.lambda_bl, "shrinkage rate (bayesian lasso)");
  sub->add_option("--burn-in", cfg.burn_in, "discarded leading iterations");
  sub->add_option("--draws", cfg.draws, "retained posterior draws");
  sub->add_option("--thin", cfg.thin, "keep every k-th draw");
  sub->add_option("--seed", cfg.seed, "sampler seed");
}

void add_project_opts(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--subspace", cfg.subspace,
                  "lasso, adaptive_lasso, elastic_net or garotte");
  sub->add_option("--gamma-ridge", cfg.gamma_ridge, "elastic net L2 strength");
  sub->add_option("--heredity", cfg.heredity_mode, "none, strong or weak (garotte)");
  sub->add_option("--heredity-parents", cfg.heredity_parents,
                  "child:parent,parent;... column indices (garotte)");
  sub->add_option("--grid-size", cfg.grid_size, "constraint grid resolution");
  sub->add_option("--grid", cfg.lambda_grid, "explicit comma separated constraint grid");
}

void add_level_opts(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--lambda", cfg.lambda_at, "constraint level (snaps to the grid)");
  sub->add_option("--loss-bound", cfg.loss_bound,
                  "calibrate to the smallest level with loss below this");
  sub->add_option("--target-size", cfg.target_size,
                  "calibrate to the level whose expected size is closest to this");
}

void add_io_opts(CLI::App* sub, RunConfig& cfg, bool with_sample) {
  if (with_sample) sub->add_option("--sample", cfg.sample_path, "draws table written by fit");
  sub->add_option("--out", cfg.out_dir, "output directory");
  sub->add_option("--workers", cfg.workers, "worker threads (0 = hardware)");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  std::string command = "klproj";
  try {
    // Config file first, flags override: scan for --config before CLI11 runs.
    for (int i = 1; i < argc; ++i) {
      std::string arg = argv[i];
      if (arg == "--config" && i + 1 < argc)
        klproj::apply_config_map(cfg, klproj::read_config_file(argv[i + 1]));
      else if (arg.rfind("--config=", 0) == 0)
        klproj::apply_config_map(cfg, klproj::read_config_file(arg.substr(9)));
    }

    CLI::App app{"Bayesian variable selection by constrained projection of posterior draws"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "key=value settings file (flags override)")
        ->expected(1);

    CLI::App* fit = app.add_subcommand("fit", "sample the encompassing posterior");
    add_data_opts(fit, cfg);
    add_sampler_opts(fit, cfg);
    add_io_opts(fit, cfg, false);

    CLI::App* project =
        app.add_subcommand("project", "loss/size curves and inclusion probabilities");
    add_data_opts(project, cfg);
    add_project_opts(project, cfg);
    add_level_opts(project, cfg);
    add_io_opts(project, cfg, true);

    CLI::App* models = app.add_subcommand("models", "pooled sparsity-pattern table");
    add_data_opts(models, cfg);
    add_project_opts(models, cfg);
    add_level_opts(models, cfg);
    models->add_option("--pooling", cfg.pooling, "along_path or at_lambda");
    models->add_option("--top-models", cfg.top_models, "patterns kept per size class");
    add_io_opts(models, cfg, true);

    CLI::App* loss = app.add_subcommand("loss-curve", "loss curves for several subspaces");
    add_data_opts(loss, cfg);
    add_project_opts(loss, cfg);
    loss->add_option("--methods", cfg.methods, "comma separated subspace list");
    add_io_opts(loss, cfg, true);

    CLI::App* predict = app.add_subcommand("predict", "mixture predictions on new rows");
    add_data_opts(predict, cfg);
    add_project_opts(predict, cfg);
    add_level_opts(predict, cfg);
    predict->add_option("--newdata", cfg.newdata_path, "covariate table to predict on");
    add_io_opts(predict, cfg, true);

    CLI::App* simulate = app.add_subcommand("simulate", "bundled simulation scenarios");
    simulate->add_option("--scenario", cfg.scenario,
                         "heredity_interaction, large_p_example1, large_p_example2, "
                         "support_consistency or precondition_contrast");
    simulate->add_option("--replicates", cfg.replicates, "replicate count (0 = default)");
    simulate->add_option("--rho", cfg.rho, "predictor correlation (heredity)");
    simulate->add_option("--sim-seed", cfg.sim_seed, "master seed (0 = default)");
    simulate->add_option("--grid", cfg.lambda_grid, "explicit comma separated constraint grid");
    add_io_opts(simulate, cfg, false);

    CLI11_PARSE(app, argc, argv);

    if (fit->parsed()) command = "fit", klproj::run_fit(cfg);
    if (project->parsed()) command = "project", klproj::run_project(cfg);
    if (models->parsed()) command = "models", klproj::run_models(cfg);
    if (loss->parsed()) command = "loss-curve", klproj::run_loss_curve(cfg);
    if (predict->parsed()) command = "predict", klproj::run_predict(cfg);
    if (simulate->parsed()) command = "simulate", klproj::run_simulate(cfg);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "klproj %s: error: %s\n", command.c_str(), e.what());
    klproj::write_error_record(cfg.out_dir, command, e.what());
    return 1;
  }
}
