#include "gbdase/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gbdase/io.hpp"

namespace gbdase {

namespace {

// One RW(r) step for a whole position matrix; prev2 is ignored when r = 1.
Eigen::MatrixXd rw_step(const Eigen::MatrixXd& prev, const Eigen::MatrixXd& prev2,
                        const Eigen::VectorXd& sigma, int r, Rng& rng) {
    Eigen::MatrixXd next = (r == 1) ? prev : Eigen::MatrixXd(2.0 * prev - prev2);
    for (Eigen::Index i = 0; i < next.rows(); ++i) {
        for (Eigen::Index k = 0; k < next.cols(); ++k) next(i, k) += sigma[i] * rng.normal();
    }
    return next;
}

// Linear-interpolation empirical quantile of a sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

Eigen::VectorXd propagate(const Eigen::MatrixXd& tail, double sigma, int k, int r, Rng& rng) {
    if (k < 1) throw std::invalid_argument("propagate: need k >= 1");
    if (r != 1 && r != 2) throw std::invalid_argument("propagate: r must be 1 or 2");
    if (tail.rows() < r) throw std::invalid_argument("propagate: tail must hold the last r positions");
    Eigen::RowVectorXd prev = tail.row(tail.rows() - 1);
    Eigen::RowVectorXd prev2 = (r == 2) ? tail.row(tail.rows() - 2) : prev;
    Eigen::VectorXd sig = Eigen::VectorXd::Constant(1, sigma);
    for (int step = 0; step < k; ++step) {
        Eigen::MatrixXd next = rw_step(prev, prev2, sig, r, rng);
        prev2 = prev;
        prev = next.row(0);
    }
    return prev.transpose();
}

Forecast forecast_expectation(const PosteriorDraws& draws, int k, int r, double level,
                              std::uint64_t seed, bool clamp01) {
    if (draws.draws.empty()) throw std::invalid_argument("forecast_expectation: no draws");
    if (k < 1) throw std::invalid_argument("forecast_expectation: need k >= 1");
    if (r != draws.config.r) {
        throw std::invalid_argument("forecast_expectation: r does not match the fitted prior order");
    }
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("forecast_expectation: level must be in (0, 1)");

    const int n = static_cast<int>(draws.draws.front().X.front().rows());
    const int m = static_cast<int>(draws.draws.front().X.size());
    const int S = static_cast<int>(draws.draws.size());
    if (m < r) throw std::invalid_argument("forecast_expectation: not enough in-sample time points");

    Forecast fc;
    fc.horizon = k;
    fc.level = level;
    fc.n_draws = S;
    fc.point.assign(k, Eigen::MatrixXd::Zero(n, n));
    fc.lower.assign(k, Eigen::MatrixXd::Zero(n, n));
    fc.upper.assign(k, Eigen::MatrixXd::Zero(n, n));

    // dyad_samples[step][dyad] collects x_i' x_j across draws for the
    // interval quantiles; dyads enumerate i <= j.
    const std::size_t n_dyads = static_cast<std::size_t>(n) * (n + 1) / 2;
    std::vector<std::vector<std::vector<double>>> dyad_samples(
        k, std::vector<std::vector<double>>(n_dyads));
    for (auto& per_step : dyad_samples) {
        for (auto& v : per_step) v.reserve(S);
    }

    Rng rng(seed);
    for (int s = 0; s < S; ++s) {
        const auto& st = draws.draws[s];
        Eigen::MatrixXd prev = st.X[m - 1];
        Eigen::MatrixXd prev2 = (r == 2) ? st.X[m - 2] : prev;
        for (int step = 0; step < k; ++step) {
            Eigen::MatrixXd next = rw_step(prev, prev2, st.sigma2.cwiseSqrt(), r, rng);
            prev2 = prev;
            prev = next;
            Eigen::MatrixXd gram = next * next.transpose();
            fc.point[step] += gram;
            std::size_t dyad = 0;
            for (int i = 0; i < n; ++i) {
                for (int j = i; j < n; ++j) dyad_samples[step][dyad++].push_back(gram(i, j));
            }
        }
    }

    const double q_lo = (1.0 - level) / 2.0;
    for (int step = 0; step < k; ++step) {
        fc.point[step] /= static_cast<double>(S);
        std::size_t dyad = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                auto& samples = dyad_samples[step][dyad++];
                std::sort(samples.begin(), samples.end());
                const double lo = quantile_sorted(samples, q_lo);
                const double hi = quantile_sorted(samples, 1.0 - q_lo);
                fc.lower[step](i, j) = fc.lower[step](j, i) = lo;
                fc.upper[step](i, j) = fc.upper[step](j, i) = hi;
            }
        }
        if (clamp01) {
            for (auto* M : {&fc.point[step], &fc.lower[step], &fc.upper[step]}) {
                *M = M->cwiseMax(0.0).cwiseMin(1.0);
            }
        }
        if (!fc.point[step].allFinite() || !fc.lower[step].allFinite() ||
            !fc.upper[step].allFinite()) {
            throw std::runtime_error("forecast_expectation: non-finite forecast values");
        }
    }
    return fc;
}

void write_forecast_csv(const Forecast& fc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_forecast_csv: cannot open " + path.string());
    out << "k,i,j,point,lower,upper\n";
    for (int step = 0; step < fc.horizon; ++step) {
        const int n = static_cast<int>(fc.point[step].rows());
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                out << (step + 1) << ',' << i << ',' << j << ','
                    << format_double(fc.point[step](i, j)) << ','
                    << format_double(fc.lower[step](i, j)) << ','
                    << format_double(fc.upper[step](i, j)) << '\n';
            }
        }
    }
}

Forecast read_forecast_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_forecast_csv: cannot open " + path.string());
    std::string line;
    std::getline(in, line);  // header
    struct Row {
        int k, i, j;
        double point, lower, upper;
    };
    std::vector<Row> rows;
    int max_k = 0, max_i = -1;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::istringstream ss(line);
        Row r;
        char c;
        if (!(ss >> r.k >> c >> r.i >> c >> r.j >> c >> r.point >> c >> r.lower >> c >> r.upper)) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": malformed row");
        }
        max_k = std::max(max_k, r.k);
        max_i = std::max({max_i, r.i, r.j});
        rows.push_back(r);
    }
    if (rows.empty()) throw std::runtime_error("read_forecast_csv: no rows in " + path.string());
    Forecast fc;
    fc.horizon = max_k;
    const int n = max_i + 1;
    fc.point.assign(max_k, Eigen::MatrixXd::Zero(n, n));
    fc.lower.assign(max_k, Eigen::MatrixXd::Zero(n, n));
    fc.upper.assign(max_k, Eigen::MatrixXd::Zero(n, n));
    for (const auto& r : rows) {
        fc.point[r.k - 1](r.i, r.j) = fc.point[r.k - 1](r.j, r.i) = r.point;
        fc.lower[r.k - 1](r.i, r.j) = fc.lower[r.k - 1](r.j, r.i) = r.lower;
        fc.upper[r.k - 1](r.i, r.j) = fc.upper[r.k - 1](r.j, r.i) = r.upper;
    }
    return fc;
}

}  // namespace gbdase
