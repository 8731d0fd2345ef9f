#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "gbdase/banded.hpp"
#include "gbdase/rng.hpp"

namespace testutil {

inline Eigen::MatrixXd random_matrix(int rows, int cols, gbdase::Rng& rng, double scale = 1.0) {
    Eigen::MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) M(i, j) = scale * rng.normal();
    }
    return M;
}

inline Eigen::MatrixXd random_symmetric(int n, gbdase::Rng& rng) {
    Eigen::MatrixXd M = random_matrix(n, n, rng);
    return 0.5 * (M + M.transpose());
}

inline Eigen::MatrixXd random_orthogonal(int d, gbdase::Rng& rng) {
    const Eigen::MatrixXd M = random_matrix(d, d, rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    return qr.householderQ();
}

// Random SPD banded matrix as B B^T + eps I with B lower-banded.
inline gbdase::BandedMatrix random_spd_banded(int dim, int bw, gbdase::Rng& rng) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
        for (int i = j; i <= std::min(dim - 1, j + bw); ++i) B(i, j) = rng.normal();
        B(j, j) += 2.0;
    }
    const Eigen::MatrixXd A = B * B.transpose() + 1e-6 * Eigen::MatrixXd::Identity(dim, dim);
    gbdase::BandedMatrix out(dim, bw);
    for (int k = 0; k <= bw; ++k) {
        for (int j = 0; j < dim - k; ++j) out.at(k, j) = A(j + k, j);
    }
    return out;
}

// Asymptotic one-sample Kolmogorov-Smirnov p-value.
inline double ks_pvalue(double d_stat, std::size_t n) {
    const double x = d_stat * (std::sqrt(static_cast<double>(n)) + 0.12 + 0.11 / std::sqrt(static_cast<double>(n)));
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * std::exp(-2.0 * k * k * x * x);
        p += (k % 2 == 1) ? term : -term;
    }
    return std::min(1.0, std::max(0.0, p));
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() / ("gbdase_test_" + tag);
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace testutil
