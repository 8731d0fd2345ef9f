// Command-line front end: simulate | fit | forecast | embed | evaluate.
#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "gbdase/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generalized Bayesian inference for dynamic random dot product graphs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", gbdase::cli::kVersion);

    const char* env_root = std::getenv("GBDASE_OUT_ROOT");
    const std::string out_root = env_root ? env_root : ".";

    gbdase::cli::SimulateArgs sim;
    std::uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    auto* sim_cmd = app.add_subcommand("simulate", "Generate synthetic dynamic networks");
    sim_cmd->add_option("spec", sim.spec_file, "SimulationSpec JSON file")->required();
    sim_cmd->add_option("--out", sim.out_dir, "Output directory")->required();
    sim_cmd->add_option("--replicates", sim.replicates, "Number of replicates");
    sim_cmd->add_option("--jobs", sim.jobs, "Parallel replicate jobs");
    sim_cmd->add_option("--seed", sim_seed, "Base seed override")->each([&](const std::string&) {
        sim_seed_set = true;
    });

    gbdase::cli::FitArgs fit;
    std::uint64_t fit_seed = 0;
    bool fit_seed_set = false;
    int fit_n = 0, fit_m = 0;
    auto* fit_cmd = app.add_subcommand("fit", "Run the Gibbs sampler on a network");
    fit_cmd->add_option("network", fit.network, "Edge-list file")->required();
    fit_cmd->add_option("--config", fit.config_file, "SamplerConfig JSON file")->required();
    fit_cmd->add_option("--out", fit.out_dir, "Output draws directory")->required();
    fit_cmd->add_option("--n", fit_n, "Node count (else from sidecar)");
    fit_cmd->add_option("--m", fit_m, "Time-point count (else from sidecar)");
    fit_cmd->add_option("--seed", fit_seed, "Seed override")->each([&](const std::string&) {
        fit_seed_set = true;
    });

    gbdase::cli::ForecastArgs fc;
    auto* fc_cmd = app.add_subcommand("forecast", "k-step-ahead forecast from posterior draws");
    fc_cmd->add_option("draws", fc.draws_dir, "Draws directory from fit")->required();
    fc_cmd->add_option("--k", fc.k, "Forecast horizon")->required();
    fc_cmd->add_option("--level", fc.level, "Credible-interval level");
    fc_cmd->add_option("--out", fc.out_csv, "Output CSV")->required();
    fc_cmd->add_option("--seed", fc.seed, "Propagation seed");
    fc_cmd->add_flag("--clamp01", fc.clamp01, "Clamp reported values to [0, 1]");

    gbdase::cli::EmbedArgs emb;
    int emb_n = 0, emb_m = 0;
    auto* emb_cmd = app.add_subcommand("embed", "Spectral embedding baselines");
    emb_cmd->add_option("network", emb.network, "Edge-list file")->required();
    emb_cmd->add_option("--method", emb.method, "ase|omni|uase|mase")->required();
    emb_cmd->add_option("--d", emb.d, "Embedding dimension")->required();
    emb_cmd->add_option("--out", emb.out_csv, "Output CSV")->required();
    emb_cmd->add_option("--n", emb_n, "Node count (else from sidecar)");
    emb_cmd->add_option("--m", emb_m, "Time-point count (else from sidecar)");

    gbdase::cli::EvaluateArgs ev;
    int ev_n = 0, ev_m = 0;
    auto* ev_cmd = app.add_subcommand("evaluate", "Compute metrics, optionally over replicate globs");
    ev_cmd->add_option("--truth", ev.truth, "Truth latents CSV (path or glob)");
    ev_cmd->add_option("--network", ev.network, "Edge-list file (path or glob)");
    ev_cmd->add_option("--embedding", ev.embedding, "Embedding CSV (path or glob)");
    ev_cmd->add_option("--draws", ev.draws, "Draws directory (path or glob)");
    ev_cmd->add_option("--forecast", ev.forecast, "Forecast CSV (path or glob)");
    ev_cmd->add_option("--metrics", ev.metrics,
                       "rmse_latent, rmse_forecast, auc, aupr, degree_gof")
        ->required()
        ->delimiter(',');
    ev_cmd->add_option("--out", ev.out_csv, "Metrics CSV")->required();
    ev_cmd->add_option("--n", ev_n, "Node count");
    ev_cmd->add_option("--m", ev_m, "Time-point count");
    ev_cmd->add_option("--gof-sims", ev.gof_sims, "Simulations for degree_gof");
    ev_cmd->add_option("--seed", ev.seed, "Seed for simulation-based metrics");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim_cmd) {
            if (sim_seed_set) sim.seed = sim_seed;
            if (sim.out_dir.is_relative()) sim.out_dir = out_root / sim.out_dir;
            return gbdase::cli::cmd_simulate(sim);
        }
        if (*fit_cmd) {
            if (fit_seed_set) fit.seed = fit_seed;
            if (fit_n > 0) fit.n = fit_n;
            if (fit_m > 0) fit.m = fit_m;
            if (fit.out_dir.is_relative()) fit.out_dir = out_root / fit.out_dir;
            return gbdase::cli::cmd_fit(fit);
        }
        if (*fc_cmd) return gbdase::cli::cmd_forecast(fc);
        if (*emb_cmd) {
            if (emb_n > 0) emb.n = emb_n;
            if (emb_m > 0) emb.m = emb_m;
            return gbdase::cli::cmd_embed(emb);
        }
        if (*ev_cmd) {
            if (ev_n > 0) ev.n = ev_n;
            if (ev_m > 0) ev.m = ev_m;
            return gbdase::cli::cmd_evaluate(ev);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
