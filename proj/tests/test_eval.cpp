#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "gbdase/eval.hpp"
#include "gbdase/simulate.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace gbdase;

TEST_SUITE("eval") {

TEST_CASE("latent rmse basics") {
    Rng rng(3);
    std::vector<Eigen::MatrixXd> X;
    for (int t = 0; t < 4; ++t) X.push_back(testutil::random_matrix(6, 2, rng));
    CHECK(rmse_latent(X, X) == doctest::Approx(0.0));

    std::vector<Eigen::MatrixXd> rotated;
    for (const auto& Xt : X) rotated.push_back(Xt * testutil::random_orthogonal(2, rng));
    CHECK(rmse_latent(X, rotated) <= 1e-8);

    std::vector<Eigen::MatrixXd> truth{(Eigen::MatrixXd(2, 1) << 1, 0).finished()};
    std::vector<Eigen::MatrixXd> est{Eigen::MatrixXd::Zero(2, 1)};
    CHECK(rmse_latent(truth, est) == doctest::Approx(std::sqrt(0.5)));

    CHECK_THROWS_AS(rmse_latent(X, truth), std::invalid_argument);
}

TEST_CASE("latent rmse symmetry and rotation invariance") {
    Rng rng(5);
    std::vector<Eigen::MatrixXd> X, Y;
    for (int t = 0; t < 3; ++t) {
        X.push_back(testutil::random_matrix(5, 2, rng));
        Y.push_back(testutil::random_matrix(5, 2, rng));
    }
    CHECK(rmse_latent(X, Y) == doctest::Approx(rmse_latent(Y, X)).epsilon(1e-10));
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<Eigen::MatrixXd> Yr;
        for (const auto& Yt : Y) Yr.push_back(Yt * testutil::random_orthogonal(2, rng));
        CHECK(rmse_latent(X, Yr) == doctest::Approx(rmse_latent(X, Y)).epsilon(1e-8));
    }
}

TEST_CASE("forecast rmse") {
    Rng rng(7);
    const Eigen::MatrixXd Xk = testutil::random_matrix(5, 2, rng);
    Forecast fc;
    fc.horizon = 1;
    fc.point.push_back(Xk * Xk.transpose());
    CHECK(rmse_forecast(Xk, fc, 1) == doctest::Approx(0.0));

    Forecast off;
    off.horizon = 1;
    off.point.push_back(Xk * Xk.transpose() + Eigen::MatrixXd::Constant(5, 5, 0.25));
    CHECK(rmse_forecast(Xk, off, 1) == doctest::Approx(0.25));

    // Three-dyad hand computation.
    Eigen::MatrixXd X3(3, 1);
    X3 << 1, 2, 3;
    Forecast f3;
    f3.horizon = 1;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(3, 3);
    P(0, 1) = P(1, 0) = 1.0;  // truth 2
    P(0, 2) = P(2, 0) = 4.0;  // truth 3
    P(1, 2) = P(2, 1) = 6.0;  // truth 6
    f3.point.push_back(P);
    CHECK(rmse_forecast(X3, f3, 1) == doctest::Approx(std::sqrt((1.0 + 1.0 + 0.0) / 3.0)));

    CHECK_THROWS_AS(rmse_forecast(Xk, fc, 2), std::invalid_argument);
}

TEST_CASE("auc examples") {
    std::vector<double> separated{0.9, 0.8, 0.2, 0.1};
    std::vector<int> labels{1, 1, 0, 0};
    CHECK(auc(separated, labels) == doctest::Approx(1.0));

    std::vector<double> equal{0.5, 0.5, 0.5, 0.5};
    CHECK(auc(equal, labels) == doctest::Approx(0.5));

    std::vector<double> s{0.1, 0.4, 0.35, 0.8};
    std::vector<int> l{0, 0, 1, 1};
    CHECK(auc(s, l) == doctest::Approx(0.75));

    std::vector<int> single{1, 1, 1, 1};
    CHECK_THROWS_AS(auc(s, single), std::invalid_argument);
}

TEST_CASE("aupr examples") {
    std::vector<double> s{0.9, 0.8, 0.7};
    std::vector<int> l{1, 0, 1};
    CHECK(aupr(s, l) == doctest::Approx(5.0 / 6.0));

    std::vector<double> perfect{0.9, 0.8, 0.2, 0.1};
    std::vector<int> lp{1, 1, 0, 0};
    CHECK(aupr(perfect, lp) == doctest::Approx(1.0));

    std::vector<int> none{0, 0, 0};
    CHECK_THROWS_AS(aupr(s, none), std::invalid_argument);
}

TEST_CASE("ranking metrics match brute force exactly") {
    Rng rng(11);
    for (int rep = 0; rep < 60; ++rep) {
        const int n = 5 + static_cast<int>(rng.uniform() * 195);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool has_pos = false, has_neg = false;
        for (int j = 0; j < n; ++j) {
            // Coarse grid of score values to force ties.
            scores[j] = std::floor(rng.uniform() * 12.0) / 12.0;
            labels[j] = rng.bernoulli(0.35) ? 1 : 0;
            has_pos |= labels[j] == 1;
            has_neg |= labels[j] == 0;
        }
        if (!has_pos || !has_neg) continue;
        CHECK(auc(scores, labels) == doctest::Approx(oracle::auc_brute(scores, labels)).epsilon(1e-12));
        CHECK(aupr(scores, labels) == doctest::Approx(oracle::aupr_brute(scores, labels)).epsilon(1e-12));
    }
}

TEST_CASE("random ranking has aupr near the prevalence") {
    Rng rng(13);
    const int n = 20000;
    const double prevalence = 0.3;
    std::vector<int> labels(n);
    for (int j = 0; j < n; ++j) labels[j] = rng.bernoulli(prevalence) ? 1 : 0;
    const int shuffles = 500;
    double acc = 0.0, acc2 = 0.0;
    for (int s = 0; s < shuffles; ++s) {
        std::vector<double> scores(n);
        for (int j = 0; j < n; ++j) scores[j] = rng.uniform();
        const double v = aupr(scores, labels);
        acc += v;
        acc2 += v * v;
    }
    const double mean = acc / shuffles;
    const double pi_hat =
        std::accumulate(labels.begin(), labels.end(), 0.0) / static_cast<double>(n);
    const double se = std::sqrt((acc2 / shuffles - mean * mean) / shuffles);
    CHECK(std::abs(mean - pi_hat) <= 3.0 * se);
}

TEST_CASE("degenerate posterior collapses the degree bands") {
    // Deterministic 0/1 probabilities: a fixed pair of unit-aligned nodes.
    const int n = 4, m = 2;
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, 2);
    X(0, 0) = 1.0;
    X(1, 0) = 1.0;  // dyad (0,1) has probability exactly 1, all others 0
    LatentState st;
    st.X.assign(m, X);
    st.sigma2 = Eigen::VectorXd::Ones(n);
    st.nu = Eigen::VectorXd::Ones(n);
    st.lambda = 1.0;
    PosteriorDraws draws;
    draws.n = n;
    draws.m = m;
    draws.draws.assign(5, st);
    draws.reference = st.X;

    DynamicNetwork net(n, m);
    net.add_edge(0, 1, 0, 1.0);
    net.add_edge(0, 1, 1, 1.0);

    const DegreeGof gof = degree_gof(draws, net, 50, 17);
    for (std::size_t g = 0; g < gof.degrees.size(); ++g) {
        CHECK(gof.lower[g] == gof.upper[g]);
        CHECK(gof.lower[g] == doctest::Approx(static_cast<double>(gof.observed[g])));
    }
}

TEST_CASE("posterior bands are wider than the plug-in bands") {
    SimulationSpec spec;
    spec.n = 20;
    spec.m = 8;
    spec.d = 2;
    spec.density = 0.12;
    spec.seed = 19;
    const SimulationResult sim = simulate(spec);
    SamplerConfig config;
    config.d = 2;
    config.n_warmup = 200;
    config.n_samples = 200;
    config.seed = 23;
    const PosteriorDraws draws = run_chain(sim.network, config);

    const DegreeGof posterior = degree_gof(draws, sim.network, 150, 29);
    const DegreeGof plugin = degree_gof_plugin(posterior_mean(draws), sim.network, 150, 29);
    double width_post = 0.0, width_plug = 0.0;
    for (std::size_t g = 0; g < posterior.degrees.size(); ++g) {
        width_post += posterior.upper[g] - posterior.lower[g];
    }
    for (std::size_t g = 0; g < plugin.degrees.size(); ++g) {
        width_plug += plugin.upper[g] - plugin.lower[g];
    }
    width_post /= static_cast<double>(posterior.degrees.size());
    width_plug /= static_cast<double>(plugin.degrees.size());
    CHECK(width_post > width_plug);
}

}  // TEST_SUITE
