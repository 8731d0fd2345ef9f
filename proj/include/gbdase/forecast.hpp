#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <vector>

#include "gbdase/rng.hpp"
#include "gbdase/sampler.hpp"

namespace gbdase {

// k-step-ahead forecast of the edge-expectation matrices with pointwise
// credible intervals. point[k-1], lower[k-1], upper[k-1] are symmetric
// n x n matrices for step k; the diagonal is reported but is not an edge.
struct Forecast {
    int horizon = 0;
    double level = 0.95;
    int n_draws = 0;
    std::vector<Eigen::MatrixXd> point, lower, upper;
};

// Propagate one node's trajectory k steps forward under the RW(r) dynamics.
// tail holds the last r positions as rows, oldest first; returns x_{m+k}.
Eigen::VectorXd propagate(const Eigen::MatrixXd& tail, double sigma, int k, int r, Rng& rng);

// Monte Carlo estimate of E(X_{m+k} X_{m+k}^T | Y_{1:m}): one RW(r)
// propagation per posterior draw, dyad-wise empirical quantiles at the
// given level for the intervals. clamp01 restricts reported values to
// [0, 1] for binary networks; off by default.
Forecast forecast_expectation(const PosteriorDraws& draws, int k, int r, double level = 0.95,
                              std::uint64_t seed = 0, bool clamp01 = false);

// CSV rows (k, i, j, point, lower, upper) for i <= j.
void write_forecast_csv(const Forecast& fc, const std::filesystem::path& path);
Forecast read_forecast_csv(const std::filesystem::path& path);

}  // namespace gbdase
