#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gbdase/dyngraph.hpp"
#include "gbdase/forecast.hpp"
#include "gbdase/sampler.hpp"

namespace gbdase {

struct MetricReport {
    std::string metric;
    std::string replicate;
    double value = 0.0;
    std::string error;  // non-empty when the metric could not be computed
};

// Procrustes-minimized per-time squared error, averaged over (m, n, d) and
// square-rooted.
double rmse_latent(const std::vector<Eigen::MatrixXd>& X_true,
                   const std::vector<Eigen::MatrixXd>& X_hat);

// Dyad-averaged RMSE between true edge expectations x_i' x_j at step k and
// the forecast point estimates.
double rmse_forecast(const Eigen::MatrixXd& latents_true, const Forecast& fc, int k);

// Exact Mann-Whitney AUC: P(score+ > score-) + 0.5 P(equal).
double auc(std::span<const double> scores, std::span<const int> labels);

// Average precision: step-wise integral of precision over recall in
// descending-score order, tie groups handled atomically.
double aupr(std::span<const double> scores, std::span<const int> labels);

// Posterior-predictive degree distribution bands (2.5 / 50 / 97.5
// percentiles per degree) against the observed counts.
struct DegreeGof {
    std::vector<int> degrees;
    std::vector<double> lower, median, upper;
    std::vector<std::int64_t> observed;
};

// One simulated Bernoulli network per (cycled) posterior draw from
// clamp(x_it' x_jt, 0, 1).
DegreeGof degree_gof(const PosteriorDraws& draws, const DynamicNetwork& net, int n_sim,
                     std::uint64_t seed);

// Plug-in variant: all simulations reuse one fixed set of latent positions,
// so the bands carry aleatoric uncertainty only.
DegreeGof degree_gof_plugin(const std::vector<Eigen::MatrixXd>& latents,
                            const DynamicNetwork& net, int n_sim, std::uint64_t seed);

// In-sample scores/labels for ranking metrics: one entry per (t, i < j)
// dyad, scores from the estimated edge expectations, labels y != 0.
void ranking_data(const DynamicNetwork& net, const std::vector<Eigen::MatrixXd>& grams,
                  std::vector<double>& scores, std::vector<int>& labels);

void write_metrics_csv(const std::vector<MetricReport>& reports, const std::filesystem::path& path);

}  // namespace gbdase
