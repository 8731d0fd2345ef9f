#include "gbdase/prior.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gbdase {

void RwPriorSpec::validate() const {
    if (r != 1 && r != 2) throw std::invalid_argument("RwPriorSpec: r must be 1 or 2");
    if (r >= m) throw std::invalid_argument("RwPriorSpec: need r < m");
    if (!(sigma0 > 0.0)) throw std::invalid_argument("RwPriorSpec: sigma0 must be positive");
    if (d < 1) throw std::invalid_argument("RwPriorSpec: d must be positive");
}

Eigen::MatrixXd difference_matrix(int r, int m) {
    if (r < 1 || r >= m) throw std::invalid_argument("difference_matrix: need 1 <= r < m");
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m - r, m);
    // Row k carries the binomial coefficients of Delta^r at position k+r.
    for (int k = 0; k < m - r; ++k) {
        double coef = 1.0;  // C(r, 0)
        for (int j = 0; j <= r; ++j) {
            D(k, k + j) = ((r - j) % 2 == 0 ? coef : -coef);
            coef = coef * (r - j) / (j + 1);
        }
    }
    return D;
}

std::pair<BandedMatrix, BandedMatrix> prior_precision_blocks(const RwPriorSpec& spec) {
    spec.validate();
    const int m = spec.m, d = spec.d, r = spec.r;
    const int dim = m * d;

    const Eigen::MatrixXd D = difference_matrix(r, m);
    const Eigen::MatrixXd DtD = D.transpose() * D;

    BandedMatrix K1(dim, r * d);
    for (int t = 0; t < m; ++t) {
        for (int s = std::max(0, t - r); s <= t; ++s) {
            const double v = DtD(t, s);
            if (v == 0.0) continue;
            // Block (t, s) of DtD (x) I_d: entries ((t*d + a), (s*d + a)).
            for (int a = 0; a < d; ++a) K1.at((t - s) * d, s * d + a) = v;
        }
    }

    BandedMatrix K2(dim, 0);
    const double w = 1.0 / (spec.sigma0 * spec.sigma0);
    for (int j = 0; j < r * d; ++j) K2.at(0, j) = w;

    return {std::move(K1), std::move(K2)};
}

double log_prior_density(const std::vector<Eigen::MatrixXd>& X, const Eigen::VectorXd& sigma,
                         const RwPriorSpec& spec) {
    spec.validate();
    const int m = spec.m, d = spec.d, r = spec.r;
    if (static_cast<int>(X.size()) != m) throw std::invalid_argument("log_prior_density: wrong m");
    const int n = static_cast<int>(X.front().rows());
    if (sigma.size() != n) throw std::invalid_argument("log_prior_density: sigma size mismatch");

    constexpr double log2pi = 1.8378770664093453;  // log(2*pi)
    double out = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!(sigma[i] > 0.0)) throw std::invalid_argument("log_prior_density: sigma must be positive");
        const double s2 = sigma[i] * sigma[i];
        // Initial states.
        double quad0 = 0.0;
        for (int t = 0; t < r; ++t) quad0 += X[t].row(i).squaredNorm();
        out += -0.5 * r * d * (log2pi + 2.0 * std::log(spec.sigma0)) -
               0.5 * quad0 / (spec.sigma0 * spec.sigma0);
        // Transitions: Delta^r x_it ~ N(0, sigma_i^2 I_d).
        double quad = 0.0;
        for (int t = r; t < m; ++t) {
            Eigen::RowVectorXd diff = X[t].row(i);
            if (r == 1) {
                diff -= X[t - 1].row(i);
            } else {
                diff += -2.0 * X[t - 1].row(i) + X[t - 2].row(i);
            }
            quad += diff.squaredNorm();
        }
        out += -0.5 * (m - r) * d * (log2pi + std::log(s2)) - 0.5 * quad / s2;
    }
    return out;
}

}  // namespace gbdase
