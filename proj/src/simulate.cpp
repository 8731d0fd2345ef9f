#include "gbdase/simulate.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace gbdase {

void SimulationSpec::validate() const {
    if (n < 2) throw std::invalid_argument("SimulationSpec: need n >= 2");
    if (m < 1) throw std::invalid_argument("SimulationSpec: need m >= 1");
    if (d < 1) throw std::invalid_argument("SimulationSpec: need d >= 1");
    if (family != "matern" && family != "bspline")
        throw std::invalid_argument("SimulationSpec: family must be \"matern\" or \"bspline\"");
    if (!(density >= 0.0 && density < 1.0))
        throw std::invalid_argument("SimulationSpec: density must be in [0, 1)");
    if (family == "matern") {
        if (!(a > 0.0) || !(nu > 0.0) || !(length_scale() > 0.0))
            throw std::invalid_argument("SimulationSpec: matern parameters must be positive");
    } else {
        if (ell < 0) throw std::invalid_argument("SimulationSpec: need ell >= 0");
        if (q < 0 || m - q < 2)
            throw std::invalid_argument("SimulationSpec: need m - q >= 2 for the spline basis");
    }
}

double matern_cov(double t, double s, double a, double b, double nu) {
    const double h = std::abs(t - s);
    if (h == 0.0) return a * a;
    const double u = std::sqrt(2.0 * nu) * h / b;
    return a * a / (std::tgamma(nu) * std::pow(2.0, nu - 1.0)) * std::pow(u, nu) *
           std::cyl_bessel_k(nu, u);
}

std::vector<Eigen::MatrixXd> sample_gp_trajectories(const SimulationSpec& spec, Rng& rng) {
    spec.validate();
    if (spec.family != "matern")
        throw std::invalid_argument("sample_gp_trajectories: matern family only");
    const int m = spec.m, n = spec.n, d = spec.d;
    const double b = spec.length_scale();

    Eigen::MatrixXd cov(m, m);
    for (int t = 0; t < m; ++t) {
        for (int s = 0; s <= t; ++s) {
            cov(t, s) = cov(s, t) = matern_cov(t + 1, s + 1, spec.a, b, spec.nu);
        }
    }
    // Matern Gram matrices on dense grids are near-singular at nu = 2.5;
    // escalate jitter until the factorization succeeds.
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 1e-10 * spec.a * spec.a;
    const double max_jitter = 1e-6 * spec.a * spec.a;
    for (;;) {
        Eigen::MatrixXd work = cov + jitter * Eigen::MatrixXd::Identity(m, m);
        llt.compute(work);
        if (llt.info() == Eigen::Success) break;
        if (jitter >= max_jitter) {
            throw std::runtime_error("sample_gp_trajectories: covariance factorization failed at max jitter");
        }
        jitter *= 10.0;
        std::cerr << "sample_gp_trajectories: escalating jitter to " << jitter << "\n";
    }
    const Eigen::MatrixXd L = llt.matrixL();

    std::vector<Eigen::MatrixXd> raw(m, Eigen::MatrixXd(n, d));
    Eigen::VectorXd z(m);
    for (int i = 0; i < n; ++i) {
        for (int h = 0; h < d; ++h) {
            for (int t = 0; t < m; ++t) z[t] = rng.normal();
            const Eigen::VectorXd path = L * z;
            for (int t = 0; t < m; ++t) raw[t](i, h) = path[t];
        }
    }
    return raw;
}

std::vector<Eigen::MatrixXd> to_latent(const std::vector<Eigen::MatrixXd>& raw, double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("to_latent: rho must be in [0, 1]");
    std::vector<Eigen::MatrixXd> out;
    out.reserve(raw.size());
    const double scale = raw.empty() ? 0.0 : rho / std::sqrt(static_cast<double>(raw.front().cols()));
    for (const auto& R : raw) {
        out.push_back(scale * (1.0 + (-R.array()).exp()).inverse().matrix());
    }
    return out;
}

double mean_edge_probability(const std::vector<Eigen::MatrixXd>& latents) {
    if (latents.empty()) throw std::invalid_argument("mean_edge_probability: no time points");
    const int n = static_cast<int>(latents.front().rows());
    double acc = 0.0;
    for (const auto& X : latents) {
        const Eigen::MatrixXd G = X * X.transpose();
        acc += (G.sum() - G.trace()) / 2.0;
    }
    const double dyads = static_cast<double>(latents.size()) * n * (n - 1) / 2.0;
    return acc / dyads;
}

double solve_density_scale(const std::vector<Eigen::MatrixXd>& latents_at_one, double target) {
    if (target == 0.0) return 0.0;
    if (!(target > 0.0 && target < 1.0))
        throw std::invalid_argument("solve_density_scale: target must be in (0, 1)");
    const double mp1 = mean_edge_probability(latents_at_one);
    if (mp1 + 1e-12 < target) {
        throw std::invalid_argument("solve_density_scale: target " + std::to_string(target) +
                                    " unattainable; max attainable density is " + std::to_string(mp1));
    }
    // Mean probability scales exactly as rho^2 * mp1 since the inner
    // products are quadratic in the common scale.
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (mid * mid * mp1 < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Eigen::VectorXd bspline_basis(double t, double T) {
    // Clamped cubic basis, knots {0, T/2, T}: 9-entry knot vector, 5 functions.
    const double knots[9] = {0, 0, 0, 0, T / 2.0, T, T, T, T};
    Eigen::VectorXd N = Eigen::VectorXd::Zero(8);
    // Degree 0.
    for (int i = 0; i < 8; ++i) {
        if ((t >= knots[i] && t < knots[i + 1]) || (t == T && knots[i] < T && knots[i + 1] == T)) {
            N[i] = 1.0;
        }
    }
    // Cox-de Boor up to degree 3.
    for (int deg = 1; deg <= 3; ++deg) {
        for (int i = 0; i + deg < 8; ++i) {
            double left = 0.0, right = 0.0;
            if (knots[i + deg] > knots[i]) left = (t - knots[i]) / (knots[i + deg] - knots[i]) * N[i];
            if (knots[i + deg + 1] > knots[i + 1]) {
                right = (knots[i + deg + 1] - t) / (knots[i + deg + 1] - knots[i + 1]) * N[i + 1];
            }
            N[i] = left + right;
        }
    }
    return N.head(5);
}

std::vector<Eigen::MatrixXd> bspline_trajectories(const SimulationSpec& spec, Rng& rng) {
    spec.validate();
    if (spec.family != "bspline")
        throw std::invalid_argument("bspline_trajectories: bspline family only");
    const int n = spec.n, d = spec.d;
    const int T_basis = spec.m - spec.q;  // in-basis region 1..T_basis
    const int T_total = spec.m + spec.ell;
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));

    std::vector<Eigen::VectorXd> basis(T_basis);
    for (int t = 1; t <= T_basis; ++t) basis[t - 1] = bspline_basis(t, T_basis);

    std::vector<Eigen::MatrixXd> out(T_total, Eigen::MatrixXd(n, d));
    // Weights are iid across (node, coordinate), so rejecting invalid
    // continuations coordinate by coordinate draws from the same conditional
    // law as whole-node redraws.
    constexpr int max_retries = 1000;
    Eigen::VectorXd u(T_total);
    for (int i = 0; i < n; ++i) {
        for (int h = 0; h < d; ++h) {
            int attempt = 0;
            for (;;) {
                if (++attempt > max_retries) {
                    throw std::runtime_error(
                        "bspline_trajectories: extrapolation left [0, 1] after " +
                        std::to_string(max_retries) + " weight redraws");
                }
                const auto w = rng.dirichlet(0.2, 5);
                const Eigen::Map<const Eigen::VectorXd> wv(w.data(), 5);
                for (int t = 0; t < T_basis; ++t) u[t] = wv.dot(basis[t]);
                const double slope = u[T_basis - 1] - u[T_basis - 2];
                for (int t = T_basis; t < T_total; ++t) {
                    u[t] = u[T_basis - 1] + slope * (t - (T_basis - 1));
                }
                if (u.minCoeff() >= 0.0 && u.maxCoeff() <= 1.0) break;
            }
            for (int t = 0; t < T_total; ++t) out[t](i, h) = scale * u[t];
        }
    }
    return out;
}

DynamicNetwork sample_bernoulli_rdpg(const std::vector<Eigen::MatrixXd>& latents, Rng& rng,
                                     bool clamp01) {
    if (latents.empty()) throw std::invalid_argument("sample_bernoulli_rdpg: no time points");
    const int n = static_cast<int>(latents.front().rows());
    const int m = static_cast<int>(latents.size());
    DynamicNetwork net(n, m);
    for (int t = 0; t < m; ++t) {
        const auto& X = latents[t];
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                double p = X.row(i).dot(X.row(j));
                if (!clamp01 && (p < -1e-12 || p > 1.0 + 1e-12)) {
                    throw std::runtime_error("sample_bernoulli_rdpg: probability " +
                                             std::to_string(p) + " outside [0, 1]");
                }
                p = std::min(1.0, std::max(0.0, p));
                if (rng.bernoulli(p)) net.add_edge(i, j, t, 1.0);
            }
        }
    }
    return net;
}

namespace {

// Mean of min(1, rho^2 p) over dyads and times, for the over-unity branch.
double mean_clamped_probability(const std::vector<Eigen::MatrixXd>& at_one, double rho) {
    const int n = static_cast<int>(at_one.front().rows());
    double acc = 0.0;
    for (const auto& X : at_one) {
        const Eigen::MatrixXd G = X * X.transpose();
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) acc += std::min(1.0, rho * rho * G(i, j));
        }
    }
    const double dyads = static_cast<double>(at_one.size()) * n * (n - 1) / 2.0;
    return acc / dyads;
}

double solve_clamped_scale(const std::vector<Eigen::MatrixXd>& at_one, double target) {
    double hi = 2.0;
    while (mean_clamped_probability(at_one, hi) < target) {
        hi *= 2.0;
        if (hi > 1e4) {
            throw std::invalid_argument(
                "simulate: density target unattainable even with clamped probabilities");
        }
    }
    double lo = 1.0;
    while (hi - lo > 1e-9 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mean_clamped_probability(at_one, mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

SimulationResult simulate(const SimulationSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    std::vector<Eigen::MatrixXd> at_one;
    if (spec.family == "matern") {
        at_one = to_latent(sample_gp_trajectories(spec, rng), 1.0);
    } else {
        at_one = bspline_trajectories(spec, rng);
    }

    double rho;
    bool clamped = false;
    if (spec.density == 0.0 || mean_edge_probability(at_one) >= spec.density) {
        rho = solve_density_scale(at_one, spec.density);
    } else {
        rho = solve_clamped_scale(at_one, spec.density);
        clamped = true;
    }

    std::vector<Eigen::MatrixXd> latents;
    latents.reserve(at_one.size());
    for (const auto& X : at_one) latents.push_back(rho * X);

    // Networks only for the in-sample window; the trailing ell points are
    // forecast truth.
    std::vector<Eigen::MatrixXd> in_sample(latents.begin(), latents.begin() + spec.m);
    SimulationResult result{std::move(latents), sample_bernoulli_rdpg(in_sample, rng, clamped),
                            rho, clamped};
    return result;
}

}  // namespace gbdase
