#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gbdase/forecast.hpp"
#include "gbdase/simulate.hpp"
#include "helpers.hpp"

using namespace gbdase;

namespace {

PosteriorDraws synthetic_draws(const std::vector<Eigen::MatrixXd>& X, double sigma, int n_draws,
                               int r) {
    PosteriorDraws draws;
    draws.n = static_cast<int>(X.front().rows());
    draws.m = static_cast<int>(X.size());
    draws.config.r = r;
    draws.config.d = static_cast<int>(X.front().cols());
    for (int s = 0; s < n_draws; ++s) {
        LatentState st;
        st.X = X;
        st.sigma2 = Eigen::VectorXd::Constant(draws.n, sigma * sigma);
        st.nu = Eigen::VectorXd::Ones(draws.n);
        st.lambda = 1.0;
        draws.draws.push_back(std::move(st));
    }
    draws.reference = X;
    return draws;
}

}  // namespace

TEST_SUITE("forecast") {

TEST_CASE("noiseless propagation") {
    Rng rng(3);
    Eigen::MatrixXd tail(2, 3);
    tail << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;  // rows: x_{m-1}, x_m

    const Eigen::VectorXd r1 = propagate(tail, 0.0, 4, 1, rng);
    CHECK((r1.transpose() - tail.row(1)).cwiseAbs().maxCoeff() == 0.0);

    const Eigen::VectorXd r2 = propagate(tail, 0.0, 2, 2, rng);
    const Eigen::RowVectorXd expected = 3.0 * tail.row(1) - 2.0 * tail.row(0);
    CHECK((r2.transpose() - expected).cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS(propagate(tail, 0.0, 0, 1, rng), std::invalid_argument);
    CHECK_THROWS_AS(propagate(tail, 0.0, 1, 3, rng), std::invalid_argument);
}

TEST_CASE("propagation moments match the closed forms") {
    Rng rng(5);
    Eigen::MatrixXd tail(2, 1);
    tail << -0.4, 0.9;
    const double sigma = 0.6;
    const int n_draws = 20000;
    for (int r : {1, 2}) {
        for (int k : {1, 2, 5}) {
            double acc = 0.0, acc2 = 0.0;
            for (int s = 0; s < n_draws; ++s) {
                const double x = propagate(tail, sigma, k, r, rng)[0];
                acc += x;
                acc2 += x * x;
            }
            const double mean = acc / n_draws;
            const double var = acc2 / n_draws - mean * mean;
            const double mean_expected = r == 1 ? tail(1, 0) : (1 + k) * tail(1, 0) - k * tail(0, 0);
            const double var_expected =
                r == 1 ? sigma * sigma * k : sigma * sigma * k * (k + 1) * (2 * k + 1) / 6.0;
            const double se_mean = std::sqrt(var / n_draws);
            const double se_var = var_expected * std::sqrt(2.0 / n_draws);
            CHECK(std::abs(mean - mean_expected) <= 5.0 * se_mean);
            CHECK(std::abs(var - var_expected) <= 5.0 * se_var);
        }
    }
}

TEST_CASE("single noiseless draw collapses to the last gram") {
    Rng rng(7);
    std::vector<Eigen::MatrixXd> X;
    for (int t = 0; t < 3; ++t) X.push_back(testutil::random_matrix(4, 2, rng));
    const PosteriorDraws draws = synthetic_draws(X, 0.0, 1, 1);
    const Forecast fc = forecast_expectation(draws, 2, 1, 0.95, 11);
    const Eigen::MatrixXd expected = X.back() * X.back().transpose();
    for (int k = 0; k < 2; ++k) {
        CHECK((fc.point[k] - expected).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((fc.upper[k] - fc.lower[k]).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("independent increments cancel across distinct nodes") {
    Rng rng(13);
    std::vector<Eigen::MatrixXd> X;
    for (int t = 0; t < 2; ++t) X.push_back(testutil::random_matrix(5, 2, rng));
    const double sigma = 0.3;
    const int S = 40000;
    const PosteriorDraws draws = synthetic_draws(X, sigma, S, 1);
    const int k = 3;
    const Forecast fc = forecast_expectation(draws, k, 1, 0.95, 17);
    const auto& Xm = X.back();
    for (int i = 0; i < 5; ++i) {
        for (int j = i + 1; j < 5; ++j) {
            const double expected = Xm.row(i).dot(Xm.row(j));
            // Var(x_i . x_j) = k s^2 (|x_i|^2 + |x_j|^2) + d (k s^2)^2.
            const double ks2 = k * sigma * sigma;
            const double var = ks2 * (Xm.row(i).squaredNorm() + Xm.row(j).squaredNorm()) +
                               2.0 * ks2 * ks2;
            const double se = std::sqrt(var / S);
            CHECK(std::abs(fc.point[k - 1](i, j) - expected) <= 5.0 * se);
        }
    }
}

TEST_CASE("symmetry and finiteness") {
    Rng rng(19);
    std::vector<Eigen::MatrixXd> X;
    for (int t = 0; t < 2; ++t) X.push_back(testutil::random_matrix(4, 2, rng));
    const PosteriorDraws draws = synthetic_draws(X, 0.5, 200, 2);
    const Forecast fc = forecast_expectation(draws, 3, 2, 0.9, 23);
    for (int k = 0; k < 3; ++k) {
        CHECK((fc.point[k] - fc.point[k].transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((fc.lower[k] - fc.lower[k].transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((fc.upper[k] - fc.upper[k].transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((fc.upper[k] - fc.lower[k]).minCoeff() >= 0.0);
        CHECK(fc.point[k].allFinite());
    }
}

TEST_CASE("interval widths widen with the horizon") {
    Rng rng(29);
    std::vector<Eigen::MatrixXd> X;
    for (int t = 0; t < 2; ++t) X.push_back(testutil::random_matrix(8, 2, rng, 0.4));
    const PosteriorDraws draws = synthetic_draws(X, 0.4, 800, 1);
    const Forecast fc = forecast_expectation(draws, 5, 1, 0.95, 31);
    double prev = 0.0;
    for (int k = 0; k < 5; ++k) {
        const double width = (fc.upper[k] - fc.lower[k]).mean();
        CHECK(width > prev - 1e-6);
        prev = width;
    }
    CHECK((fc.upper[4] - fc.lower[4]).mean() > (fc.upper[0] - fc.lower[0]).mean());
}

TEST_CASE("point estimates stabilize as draws double") {
    Rng rng(59);
    std::vector<Eigen::MatrixXd> X;
    for (int t = 0; t < 2; ++t) X.push_back(testutil::random_matrix(6, 2, rng, 0.5));
    const double sigma = 0.5;
    const int S = 2000;
    const PosteriorDraws small = synthetic_draws(X, sigma, S, 1);
    const PosteriorDraws big = synthetic_draws(X, sigma, 2 * S, 1);
    const Forecast fc_small = forecast_expectation(small, 1, 1, 0.95, 101);
    const Forecast fc_big = forecast_expectation(big, 1, 1, 0.95, 103);
    // Both estimate the same expectation; the gap is O(S^{-1/2}) with a
    // per-dyad scale bounded by the propagation variance.
    const double ks2 = sigma * sigma;
    double worst = 0.0;
    for (int i = 0; i < 6; ++i) {
        for (int j = i; j < 6; ++j) {
            const double var = ks2 * (X[1].row(i).squaredNorm() + X[1].row(j).squaredNorm()) +
                               2.0 * ks2 * ks2 + 2.0 * ks2 * (i == j ? 2.0 : 0.0);
            const double se = std::sqrt(var / S) * 1.5;
            worst = std::max(worst,
                             std::abs(fc_small.point[0](i, j) - fc_big.point[0](i, j)) / se);
        }
    }
    CHECK(worst < 6.0);
}

TEST_CASE("first-order point forecasts are constant across horizons") {
    Rng rng(67);
    std::vector<Eigen::MatrixXd> X;
    for (int t = 0; t < 2; ++t) X.push_back(testutil::random_matrix(6, 2, rng, 0.5));
    const double sigma = 0.4;
    const int S = 30000;
    const PosteriorDraws draws = synthetic_draws(X, sigma, S, 1);
    const Forecast fc = forecast_expectation(draws, 4, 1, 0.95, 71);
    const auto& Xm = X.back();
    // Off-diagonal expectations are x_im' x_jm at every horizon; the
    // diagonal grows with the propagation variance and is excluded.
    for (int k = 1; k < 4; ++k) {
        for (int i = 0; i < 6; ++i) {
            for (int j = i + 1; j < 6; ++j) {
                const double ks2 = (k + 1) * sigma * sigma;
                const double var = ks2 * (Xm.row(i).squaredNorm() + Xm.row(j).squaredNorm()) +
                                   2.0 * ks2 * ks2;
                const double se = std::sqrt(2.0 * var / S);
                CHECK(std::abs(fc.point[k](i, j) - fc.point[0](i, j)) <= 6.0 * se);
            }
        }
    }
}

TEST_CASE("input validation") {
    Rng rng(37);
    std::vector<Eigen::MatrixXd> X{testutil::random_matrix(3, 1, rng),
                                   testutil::random_matrix(3, 1, rng)};
    const PosteriorDraws draws = synthetic_draws(X, 0.1, 4, 1);
    CHECK_THROWS_AS(forecast_expectation(draws, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(forecast_expectation(draws, 1, 2), std::invalid_argument);
    PosteriorDraws empty;
    empty.config.r = 1;
    CHECK_THROWS_AS(forecast_expectation(empty, 1, 1), std::invalid_argument);
}

TEST_CASE("forecast csv round trip") {
    testutil::TempDir dir("forecast_csv");
    Rng rng(41);
    std::vector<Eigen::MatrixXd> X{testutil::random_matrix(3, 2, rng),
                                   testutil::random_matrix(3, 2, rng)};
    const PosteriorDraws draws = synthetic_draws(X, 0.2, 50, 1);
    const Forecast fc = forecast_expectation(draws, 2, 1, 0.95, 43);
    write_forecast_csv(fc, dir.path / "fc.csv");
    const Forecast back = read_forecast_csv(dir.path / "fc.csv");
    REQUIRE(back.horizon == 2);
    for (int k = 0; k < 2; ++k) {
        CHECK((back.point[k] - fc.point[k]).cwiseAbs().maxCoeff() == 0.0);
        CHECK((back.lower[k] - fc.lower[k]).cwiseAbs().maxCoeff() == 0.0);
        CHECK((back.upper[k] - fc.upper[k]).cwiseAbs().maxCoeff() == 0.0);
    }
}

}  // TEST_SUITE
