#include "gbdase/sampler.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "gbdase/io.hpp"
#include "gbdase/spectral.hpp"

namespace gbdase {

namespace {
constexpr double kSigma2Floor = 1e-8;
constexpr double kLambdaCap = 1e6;
}  // namespace

void SamplerConfig::validate() const {
    if (r != 1 && r != 2) throw std::invalid_argument("SamplerConfig: r must be 1 or 2");
    if (!(sigma0 > 0.0)) throw std::invalid_argument("SamplerConfig: sigma0 must be positive");
    if (d < 1) throw std::invalid_argument("SamplerConfig: d must be positive");
    if (!(a_lambda > 0.0) || !(b_lambda > 0.0))
        throw std::invalid_argument("SamplerConfig: a_lambda and b_lambda must be positive");
    if (n_samples < 1) throw std::invalid_argument("SamplerConfig: n_samples >= 1");
    if (n_warmup < 0) throw std::invalid_argument("SamplerConfig: n_warmup >= 0");
    if (thin < 1) throw std::invalid_argument("SamplerConfig: thin >= 1");
    if (fixed_lambda && !(*fixed_lambda > 0.0))
        throw std::invalid_argument("SamplerConfig: fixed_lambda must be positive");
    if (!(loss_multiplier > 0.0))
        throw std::invalid_argument("SamplerConfig: loss_multiplier must be positive");
}

LatentState init_state(const DynamicNetwork& net, const SamplerConfig& config) {
    const int n = net.node_count();
    const int m = net.time_count();
    const int d = config.d;
    if (d > n) throw std::invalid_argument("init_state: d must not exceed the node count");

    LatentState state;
    Embedding emb = ase_all(net, d);
    sequential_align(emb.positions);
    state.X = std::move(emb.positions);

    state.sigma2.resize(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int t = 1; t < m; ++t) acc += (state.X[t].row(i) - state.X[t - 1].row(i)).squaredNorm();
        const double denom = static_cast<double>(m - 1) * d;
        state.sigma2[i] = std::max(kSigma2Floor, denom > 0 ? acc / denom : kSigma2Floor);
    }
    state.nu = Eigen::VectorXd::Ones(n);

    // Plug-in precision: one over the sample variance of the edge variables
    // over all dyads and times, zeros included.
    const double dyads = static_cast<double>(m) * n * (n - 1) / 2.0;
    const double s1 = net.sum_weights();
    const double s2 = net.sum_squared_weights() / 2.0;
    const double mean = s1 / dyads;
    const double var = dyads > 1 ? (s2 - dyads * mean * mean) / (dyads - 1.0) : 0.0;
    if (var > 0.0 && 1.0 / var < kLambdaCap) {
        state.lambda = 1.0 / var;
    } else {
        std::cerr << "init_state: degenerate edge-variable variance; capping lambda at "
                  << kLambdaCap << "\n";
        state.lambda = kLambdaCap;
    }
    if (config.fixed_lambda) state.lambda = *config.fixed_lambda;
    return state;
}

GibbsSampler::GibbsSampler(const DynamicNetwork& net, const SamplerConfig& config)
    : GibbsSampler(net, config, init_state(net, config)) {}

GibbsSampler::GibbsSampler(const DynamicNetwork& net, const SamplerConfig& config,
                           LatentState state)
    : net_(net),
      config_(config),
      state_(std::move(state)),
      rng_(config.seed),
      n_(net.node_count()),
      m_(net.time_count()),
      d_(config.d),
      k1_(m_ * config.d, config.r * config.d),
      k2_(m_ * config.d, 0),
      precision_ws_(m_ * config.d, config.r * config.d),
      factor_ws_(m_ * config.d, config.r * config.d),
      rhs_ws_(m_ * config.d),
      z_ws_(m_ * config.d) {
    RwPriorSpec prior{config.r, config.sigma0, d_, m_};
    prior.validate();
    auto blocks = prior_precision_blocks(prior);
    k1_ = std::move(blocks.first);
    k2_ = std::move(blocks.second);
    cache_.assign(m_, Eigen::MatrixXd::Zero(d_, d_));
    for (int t = 0; t < m_; ++t) {
        cache_[t] = state_.X[t].transpose() * state_.X[t];
    }
}

void GibbsSampler::downdate_cache(int i) {
    for (int t = 0; t < m_; ++t) {
        cache_[t].noalias() -= state_.X[t].row(i).transpose() * state_.X[t].row(i);
    }
}

void GibbsSampler::update_cache(int i) {
    for (int t = 0; t < m_; ++t) {
        cache_[t].noalias() += state_.X[t].row(i).transpose() * state_.X[t].row(i);
    }
}

// Precondition: cache currently excludes node i.
void GibbsSampler::assemble(int i, BandedMatrix& P, Eigen::VectorXd& rhs) {
    const double lam = config_.loss_multiplier * state_.lambda;
    P.set_zero();
    P.add_scaled(k1_, 1.0 / state_.sigma2[i]);
    P.add_scaled(k2_, 1.0);
    for (int j = 0; j < m_ * d_; ++j) P.at(0, j) += 0.5 * lam;
    for (int t = 0; t < m_; ++t) {
        const auto& R = cache_[t];
        for (int b = 0; b < d_; ++b) {
            for (int a = b; a < d_; ++a) P.at(a - b, t * d_ + b) += lam * R(a, b);
        }
    }
    rhs.setZero();
    std::uint64_t rhs_ops = 0;
    for (int t = 0; t < m_; ++t) {
        auto seg = rhs.segment(t * d_, d_);
        for (const auto& [j, y] : net_.neighbors(i, t)) {
            seg += y * state_.X[t].row(j).transpose();
        }
        rhs_ops += net_.neighbors(i, t).size() * static_cast<std::uint64_t>(d_);
    }
    rhs *= lam;
    counters_.trajectory_touched +=
        rhs_ops + static_cast<std::uint64_t>(m_) * d_ * (config_.r * d_ + 2 + d_);
}

void GibbsSampler::full_conditional(int i, BandedMatrix& P, Eigen::VectorXd& rhs) {
    downdate_cache(i);
    assemble(i, P, rhs);
    update_cache(i);
}

void GibbsSampler::sample_trajectory(int i) {
    downdate_cache(i);
    assemble(i, precision_ws_, rhs_ws_);

    auto& ops = banded_op_counts();
    const std::uint64_t before = ops.factor_fma + ops.solve_fma;
    cholesky_banded(precision_ws_, factor_ws_);
    Eigen::VectorXd mu = solve_banded(factor_ws_, rhs_ws_);
    for (int j = 0; j < m_ * d_; ++j) z_ws_[j] = rng_.normal();
    Eigen::VectorXd u = solve_lower_transpose(factor_ws_, z_ws_);
    counters_.trajectory_touched += ops.factor_fma + ops.solve_fma - before;

    for (int t = 0; t < m_; ++t) {
        state_.X[t].row(i) = (mu.segment(t * d_, d_) + u.segment(t * d_, d_)).transpose();
    }
    update_cache(i);
}

void GibbsSampler::sample_variances() {
    const int r = config_.r;
    const double shape = (static_cast<double>(m_ - r) * d_ + 1.0) / 2.0;
    for (int i = 0; i < n_; ++i) {
        double incr = 0.0;
        for (int t = r; t < m_; ++t) {
            Eigen::RowVectorXd diff = state_.X[t].row(i) - state_.X[t - 1].row(i);
            if (r == 2) diff += state_.X[t - 2].row(i) - state_.X[t - 1].row(i);
            incr += diff.squaredNorm();
        }
        const double rate = 0.5 * incr + 1.0 / state_.nu[i];
        double draw = rng_.inverse_gamma(shape, rate);
        if (draw < kSigma2Floor) {
            draw = kSigma2Floor;
            ++counters_.sigma_floor_hits;
            if (!sigma_floor_warned_) {
                std::cerr << "sampler: sigma2 draw hit the " << kSigma2Floor << " floor\n";
                sigma_floor_warned_ = true;
            }
        }
        state_.sigma2[i] = draw;
        state_.nu[i] = rng_.inverse_gamma(1.0, 1.0 + 1.0 / state_.sigma2[i]);
    }
}

double GibbsSampler::loss() const {
    // ||Y_t - X_t X_t^T||_F^2 accumulated via <Y,Y> - 2<Y, XX^T> + ||X^T X||_F^2;
    // the last term covers the hollow diagonal's residual.
    double cross = 0.0;
    double gram4 = 0.0;
    for (int t = 0; t < m_; ++t) {
        const auto& X = state_.X[t];
        for (int i = 0; i < n_; ++i) {
            for (const auto& [j, y] : net_.neighbors(i, t)) {
                cross += y * X.row(i).dot(X.row(j));
            }
        }
        gram4 += (X.transpose() * X).squaredNorm();
    }
    return net_.sum_squared_weights() - 2.0 * cross + gram4;
}

void GibbsSampler::sample_lambda() {
    const double alpha = config_.loss_multiplier;
    const double current_loss = loss();
    last_loss_ = current_loss;
    counters_.lambda_touched += static_cast<std::uint64_t>(n_) * m_ * d_ * d_ +
                                2 * static_cast<std::uint64_t>(net_.edge_count()) * d_;
    if (config_.fixed_lambda) return;
    const double shape = config_.a_lambda + alpha * static_cast<double>(n_) * (n_ + 1) * m_ / 4.0;
    const double rate = config_.b_lambda + alpha * current_loss / 4.0;
    state_.lambda = rng_.gamma(shape, rate);
}

void GibbsSampler::sweep() {
    for (int i = 0; i < n_; ++i) sample_trajectory(i);
    sample_variances();
    sample_lambda();
}

double GibbsSampler::cache_error() const {
    double err = 0.0;
    for (int t = 0; t < m_; ++t) {
        Eigen::MatrixXd fresh = state_.X[t].transpose() * state_.X[t];
        err = std::max(err, (fresh - cache_[t]).cwiseAbs().maxCoeff());
    }
    return err;
}

PosteriorDraws run_chain(const DynamicNetwork& net, const SamplerConfig& config) {
    config.validate();
    const int m = net.time_count();
    RwPriorSpec prior{config.r, config.sigma0, config.d, m};
    prior.validate();

    PosteriorDraws out;
    out.config = config;
    out.n = net.node_count();
    out.m = m;
    out.draws.reserve(config.n_samples);

    GibbsSampler sampler(net, config);
    const int total = config.n_warmup + config.n_samples * config.thin;
    for (int s = 1; s <= total; ++s) {
        sampler.sweep();
#ifndef NDEBUG
        if (s % 100 == 0 && sampler.cache_error() > 1e-8)
            throw std::logic_error("run_chain: outer-product cache drifted");
#endif
        const auto& st = sampler.state();
        out.trace.push_back({s, st.lambda, st.sigma2.mean(), sampler.last_loss()});
        if (s > config.n_warmup && (s - config.n_warmup) % config.thin == 0) {
            out.draws.push_back(st);
        }
    }
    postprocess_draws(out);
    return out;
}

void postprocess_draws(PosteriorDraws& draws) {
    if (draws.draws.empty()) throw std::invalid_argument("postprocess_draws: no draws");
    draws.reference = draws.draws.back().X;
    sequential_align(draws.reference);
    for (auto& draw : draws.draws) {
        for (std::size_t t = 0; t < draw.X.size(); ++t) {
            draw.X[t] = draw.X[t] * procrustes(draw.X[t], draws.reference[t]);
        }
    }
}

std::vector<Eigen::MatrixXd> posterior_mean(const PosteriorDraws& draws) {
    if (draws.draws.empty()) throw std::invalid_argument("posterior_mean: no draws");
    std::vector<Eigen::MatrixXd> mean = draws.draws.front().X;
    for (std::size_t s = 1; s < draws.draws.size(); ++s) {
        for (std::size_t t = 0; t < mean.size(); ++t) mean[t] += draws.draws[s].X[t];
    }
    for (auto& M : mean) M /= static_cast<double>(draws.draws.size());
    return mean;
}

namespace {

nlohmann::json config_to_json(const SamplerConfig& c, int n, int m) {
    nlohmann::json j;
    j["d"] = c.d;
    j["r"] = c.r;
    j["sigma0"] = c.sigma0;
    j["a_lambda"] = c.a_lambda;
    j["b_lambda"] = c.b_lambda;
    j["n_warmup"] = c.n_warmup;
    j["n_samples"] = c.n_samples;
    j["thin"] = c.thin;
    j["seed"] = c.seed;
    if (c.fixed_lambda) {
        j["fixed_lambda"] = *c.fixed_lambda;
    } else {
        j["fixed_lambda"] = nullptr;
    }
    j["loss_multiplier"] = c.loss_multiplier;
    j["n"] = n;
    j["m"] = m;
    return j;
}

SamplerConfig config_from_json(const nlohmann::json& j, int& n, int& m) {
    SamplerConfig c;
    c.d = j.at("d").get<int>();
    c.r = j.at("r").get<int>();
    c.sigma0 = j.at("sigma0").get<double>();
    c.a_lambda = j.at("a_lambda").get<double>();
    c.b_lambda = j.at("b_lambda").get<double>();
    c.n_warmup = j.at("n_warmup").get<int>();
    c.n_samples = j.at("n_samples").get<int>();
    c.thin = j.at("thin").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("fixed_lambda").is_null()) c.fixed_lambda = j.at("fixed_lambda").get<double>();
    c.loss_multiplier = j.at("loss_multiplier").get<double>();
    n = j.at("n").get<int>();
    m = j.at("m").get<int>();
    return c;
}

std::string draw_dir_name(std::size_t k) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%05zu", k + 1);
    return buf;
}

}  // namespace

void save_draws(const PosteriorDraws& draws, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "draws");
    write_text_file(dir / "config.json", config_to_json(draws.config, draws.n, draws.m).dump(2) + "\n");
    write_positions_csv(dir / "reference.csv", draws.reference);

    std::string trace = "sweep,lambda,mean_sigma2,loss\n";
    for (const auto& row : draws.trace) {
        trace += std::to_string(row.sweep) + ',' + format_double(row.lambda) + ',' +
                 format_double(row.mean_sigma2) + ',' + format_double(row.loss) + '\n';
    }
    write_text_file(dir / "trace.csv", trace);

    for (std::size_t k = 0; k < draws.draws.size(); ++k) {
        const fs::path ddir = dir / "draws" / draw_dir_name(k);
        fs::create_directories(ddir);
        const auto& st = draws.draws[k];
        write_positions_csv(ddir / "positions.csv", st.X);
        nlohmann::json scalars;
        scalars["lambda"] = st.lambda;
        scalars["sigma2"] = std::vector<double>(st.sigma2.data(), st.sigma2.data() + st.sigma2.size());
        scalars["nu"] = std::vector<double>(st.nu.data(), st.nu.data() + st.nu.size());
        write_text_file(ddir / "scalars.json", scalars.dump(2) + "\n");
    }
}

PosteriorDraws load_draws(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    PosteriorDraws out;
    const auto cfg = nlohmann::json::parse(read_text_file(dir / "config.json"));
    out.config = config_from_json(cfg, out.n, out.m);
    out.reference = read_positions_csv(dir / "reference.csv");

    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(dir / "draws")) {
        if (entry.is_directory()) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& ddir : dirs) {
        LatentState st;
        st.X = read_positions_csv(ddir / "positions.csv");
        const auto scalars = nlohmann::json::parse(read_text_file(ddir / "scalars.json"));
        st.lambda = scalars.at("lambda").get<double>();
        const auto s2 = scalars.at("sigma2").get<std::vector<double>>();
        const auto nu = scalars.at("nu").get<std::vector<double>>();
        st.sigma2 = Eigen::Map<const Eigen::VectorXd>(s2.data(), s2.size());
        st.nu = Eigen::Map<const Eigen::VectorXd>(nu.data(), nu.size());
        out.draws.push_back(std::move(st));
    }
    if (out.draws.empty()) throw std::runtime_error("load_draws: no draws found in " + dir.string());
    return out;
}

}  // namespace gbdase
