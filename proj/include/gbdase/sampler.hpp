#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "gbdase/banded.hpp"
#include "gbdase/dyngraph.hpp"
#include "gbdase/prior.hpp"
#include "gbdase/rng.hpp"

namespace gbdase {

// One MCMC state: latent positions, per-node transition variances with
// their half-Cauchy auxiliaries, and the learning rate.
struct LatentState {
    std::vector<Eigen::MatrixXd> X;  // m matrices, n x d
    Eigen::VectorXd sigma2;          // n
    Eigen::VectorXd nu;              // n
    double lambda = 1.0;
};

struct SamplerConfig {
    int d = 2;
    int r = 1;
    double sigma0 = 1.0;
    double a_lambda = 1e-3;
    double b_lambda = 1e-3;
    int n_warmup = 0;
    int n_samples = 1;
    int thin = 1;
    std::uint64_t seed = 0;
    std::optional<double> fixed_lambda;  // empirical-Bayes mode: skip the lambda step
    double loss_multiplier = 1.0;        // fractional-posterior exponent

    void validate() const;
};

struct TraceRow {
    int sweep;
    double lambda;
    double mean_sigma2;
    double loss;
};

struct PosteriorDraws {
    std::vector<LatentState> draws;
    std::vector<Eigen::MatrixXd> reference;  // alignment reference
    SamplerConfig config;
    int n = 0, m = 0;
    std::vector<TraceRow> trace;
};

// Touched-entry counters for the complexity contract; FMA-level counts, not
// wall time.
struct SweepCounters {
    std::uint64_t trajectory_touched = 0;
    std::uint64_t lambda_touched = 0;
    std::uint64_t sigma_floor_hits = 0;
    void reset() { trajectory_touched = lambda_touched = sigma_floor_hits = 0; }
};

// Sequentially aligned per-time ASE for the positions, empirical increment
// variances for sigma2, nu = 1, and lambda = one over the sample variance
// of the edge variables (zeros included, capped at 1e6 for degenerate data).
LatentState init_state(const DynamicNetwork& net, const SamplerConfig& config);

// Gibbs sampler over the generalized posterior. A chain is strictly
// sequential internally (the trajectory cache creates a data dependency
// across nodes); run several instances for multiple chains.
class GibbsSampler {
public:
    GibbsSampler(const DynamicNetwork& net, const SamplerConfig& config);
    GibbsSampler(const DynamicNetwork& net, const SamplerConfig& config, LatentState state);

    const LatentState& state() const { return state_; }
    LatentState& state() { return state_; }

    void sweep();

    // Individual steps, in the fixed in-sweep order 1..n, variances, lambda.
    void sample_trajectory(int i);
    void sample_variances();
    void sample_lambda();

    // Sparse-path full conditional of node i's stacked trajectory:
    // precision P_i and the right-hand side P_i mu_i of the normal
    // equations.
    void full_conditional(int i, BandedMatrix& precision, Eigen::VectorXd& rhs);

    // sum_t ||Y_t - X_t X_t^T||_F^2 at the current state.
    double loss() const;

    // Loss computed by the most recent lambda step of sweep().
    double last_loss() const { return last_loss_; }

    // Max abs deviation between the running outer-product cache and a from-
    // scratch recomputation.
    double cache_error() const;

    SweepCounters& counters() { return counters_; }
    Rng& rng() { return rng_; }

private:
    void downdate_cache(int i);
    void update_cache(int i);
    void assemble(int i, BandedMatrix& precision, Eigen::VectorXd& rhs);

    const DynamicNetwork& net_;
    SamplerConfig config_;
    LatentState state_;
    Rng rng_;
    int n_, m_, d_;
    BandedMatrix k1_, k2_;
    std::vector<Eigen::MatrixXd> cache_;  // m matrices, d x d: sum_i x_it x_it^T
    BandedMatrix precision_ws_;
    BandedCholesky factor_ws_;
    Eigen::VectorXd rhs_ws_, z_ws_;
    SweepCounters counters_;
    double last_loss_ = 0.0;
    bool sigma_floor_warned_ = false;
};

// Run warmup + thinned sampling sweeps and post-process the retained draws.
// Deterministic given config.seed.
PosteriorDraws run_chain(const DynamicNetwork& net, const SamplerConfig& config);

// Align every draw to the sequentially-aligned last draw by per-time
// Procrustes rotations; Gram matrices are unchanged.
void postprocess_draws(PosteriorDraws& draws);

void save_draws(const PosteriorDraws& draws, const std::filesystem::path& dir);
PosteriorDraws load_draws(const std::filesystem::path& dir);

// Pointwise posterior mean of the aligned draws.
std::vector<Eigen::MatrixXd> posterior_mean(const PosteriorDraws& draws);

}  // namespace gbdase
