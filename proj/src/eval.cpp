#include "gbdase/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "gbdase/io.hpp"
#include "gbdase/simulate.hpp"
#include "gbdase/spectral.hpp"

namespace gbdase {

double rmse_latent(const std::vector<Eigen::MatrixXd>& X_true,
                   const std::vector<Eigen::MatrixXd>& X_hat) {
    if (X_true.size() != X_hat.size() || X_true.empty())
        throw std::invalid_argument("rmse_latent: shape mismatch");
    const auto n = X_true.front().rows();
    const auto d = X_true.front().cols();
    double acc = 0.0;
    for (std::size_t t = 0; t < X_true.size(); ++t) {
        if (X_true[t].rows() != n || X_true[t].cols() != d || X_hat[t].rows() != n ||
            X_hat[t].cols() != d) {
            throw std::invalid_argument("rmse_latent: shape mismatch at time " + std::to_string(t));
        }
        const Eigen::MatrixXd W = procrustes(X_hat[t], X_true[t]);
        acc += (X_true[t] - X_hat[t] * W).squaredNorm();
    }
    return std::sqrt(acc / (static_cast<double>(X_true.size()) * n * d));
}

double rmse_forecast(const Eigen::MatrixXd& latents_true, const Forecast& fc, int k) {
    if (k < 1 || k > fc.horizon) throw std::invalid_argument("rmse_forecast: horizon too short");
    const int n = static_cast<int>(latents_true.rows());
    const auto& P = fc.point[k - 1];
    if (P.rows() != n) throw std::invalid_argument("rmse_forecast: node count mismatch");
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double truth = latents_true.row(i).dot(latents_true.row(j));
            acc += (truth - P(i, j)) * (truth - P(i, j));
        }
    }
    return std::sqrt(2.0 * acc / (static_cast<double>(n) * (n - 1)));
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("auc: size mismatch");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Rank-sum with average ranks over tie groups.
    double pos_rank_sum = 0.0;
    std::size_t n_pos = 0, n_neg = 0;
    std::size_t idx = 0;
    while (idx < n) {
        std::size_t end = idx;
        while (end < n && scores[order[end]] == scores[order[idx]]) ++end;
        const double avg_rank = 0.5 * (static_cast<double>(idx + 1) + static_cast<double>(end));
        for (std::size_t k = idx; k < end; ++k) {
            if (labels[order[k]] != 0) {
                pos_rank_sum += avg_rank;
                ++n_pos;
            } else {
                ++n_neg;
            }
        }
        idx = end;
    }
    if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auc: both classes must be present");
    return (pos_rank_sum - 0.5 * n_pos * (n_pos + 1)) / (static_cast<double>(n_pos) * n_neg);
}

double aupr(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("aupr: size mismatch");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::size_t n_pos = 0;
    for (int lab : labels) n_pos += (lab != 0);
    if (n_pos == 0) throw std::invalid_argument("aupr: at least one positive required");

    double ap = 0.0;
    std::size_t tp = 0, seen = 0;
    std::size_t idx = 0;
    while (idx < n) {
        std::size_t end = idx;
        std::size_t group_tp = 0;
        while (end < n && scores[order[end]] == scores[order[idx]]) {
            group_tp += (labels[order[end]] != 0);
            ++end;
        }
        tp += group_tp;
        seen = end;
        // Precision at the group boundary weighted by the recall step.
        ap += static_cast<double>(group_tp) / n_pos * (static_cast<double>(tp) / seen);
        idx = end;
    }
    return ap;
}

namespace {

DegreeGof gof_from_samples(const std::vector<std::map<int, std::int64_t>>& sims,
                           const DynamicNetwork& net) {
    const auto observed = degree_counts(net);
    int max_deg = observed.empty() ? 0 : observed.rbegin()->first;
    for (const auto& sim : sims) {
        if (!sim.empty()) max_deg = std::max(max_deg, sim.rbegin()->first);
    }
    DegreeGof out;
    std::vector<double> samples(sims.size());
    for (int deg = 0; deg <= max_deg; ++deg) {
        for (std::size_t s = 0; s < sims.size(); ++s) {
            auto it = sims[s].find(deg);
            samples[s] = it == sims[s].end() ? 0.0 : static_cast<double>(it->second);
        }
        std::sort(samples.begin(), samples.end());
        auto quant = [&](double q) {
            const double pos = q * (static_cast<double>(samples.size()) - 1.0);
            const auto lo = static_cast<std::size_t>(std::floor(pos));
            const auto hi = static_cast<std::size_t>(std::ceil(pos));
            return samples[lo] + (samples[hi] - samples[lo]) * (pos - lo);
        };
        out.degrees.push_back(deg);
        out.lower.push_back(quant(0.025));
        out.median.push_back(quant(0.5));
        out.upper.push_back(quant(0.975));
        auto it = observed.find(deg);
        out.observed.push_back(it == observed.end() ? 0 : it->second);
    }
    return out;
}

std::map<int, std::int64_t> simulate_degrees(const std::vector<Eigen::MatrixXd>& latents,
                                             Rng& rng) {
    const int n = static_cast<int>(latents.front().rows());
    const int m = static_cast<int>(latents.size());
    DynamicNetwork sim(n, m);
    for (int t = 0; t < m; ++t) {
        const Eigen::MatrixXd G = latents[t] * latents[t].transpose();
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double p = std::min(1.0, std::max(0.0, G(i, j)));
                if (rng.bernoulli(p)) sim.add_edge(i, j, t, 1.0);
            }
        }
    }
    return degree_counts(sim);
}

}  // namespace

DegreeGof degree_gof(const PosteriorDraws& draws, const DynamicNetwork& net, int n_sim,
                     std::uint64_t seed) {
    if (draws.draws.empty()) throw std::invalid_argument("degree_gof: no draws");
    if (n_sim < 1) throw std::invalid_argument("degree_gof: need n_sim >= 1");
    Rng rng(seed);
    std::vector<std::map<int, std::int64_t>> sims;
    sims.reserve(n_sim);
    for (int s = 0; s < n_sim; ++s) {
        const auto& st = draws.draws[s % draws.draws.size()];
        sims.push_back(simulate_degrees(st.X, rng));
    }
    return gof_from_samples(sims, net);
}

DegreeGof degree_gof_plugin(const std::vector<Eigen::MatrixXd>& latents,
                            const DynamicNetwork& net, int n_sim, std::uint64_t seed) {
    if (n_sim < 1) throw std::invalid_argument("degree_gof_plugin: need n_sim >= 1");
    Rng rng(seed);
    std::vector<std::map<int, std::int64_t>> sims;
    sims.reserve(n_sim);
    for (int s = 0; s < n_sim; ++s) sims.push_back(simulate_degrees(latents, rng));
    return gof_from_samples(sims, net);
}

void ranking_data(const DynamicNetwork& net, const std::vector<Eigen::MatrixXd>& grams,
                  std::vector<double>& scores, std::vector<int>& labels) {
    const int n = net.node_count();
    const int m = net.time_count();
    if (static_cast<int>(grams.size()) != m)
        throw std::invalid_argument("ranking_data: time count mismatch");
    scores.clear();
    labels.clear();
    scores.reserve(static_cast<std::size_t>(m) * n * (n - 1) / 2);
    labels.reserve(scores.capacity());
    for (int t = 0; t < m; ++t) {
        const auto& G = grams[t];
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                scores.push_back(G(i, j));
                labels.push_back(net.value(i, j, t) != 0.0 ? 1 : 0);
            }
        }
    }
}

void write_metrics_csv(const std::vector<MetricReport>& reports,
                       const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_metrics_csv: cannot open " + path.string());
    out << "replicate,metric,value,error\n";
    for (const auto& r : reports) {
        out << r.replicate << ',' << r.metric << ','
            << (r.error.empty() ? format_double(r.value) : std::string("nan")) << ',' << r.error
            << '\n';
    }
}

}  // namespace gbdase
