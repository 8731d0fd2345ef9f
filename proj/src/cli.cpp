#include "gbdase/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <iostream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>
#include <sstream>

#include "gbdase/eval.hpp"
#include "gbdase/forecast.hpp"
#include "gbdase/io.hpp"
#include "gbdase/sampler.hpp"
#include "gbdase/simulate.hpp"
#include "gbdase/spectral.hpp"

namespace gbdase::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json parse_json_file(const fs::path& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw std::runtime_error(where + ": unknown key \"" + key + "\"");
        }
    }
}

SimulationSpec parse_simulation_spec(const fs::path& path) {
    const json j = parse_json_file(path);
    reject_unknown_keys(j, {"n", "m", "d", "family", "a", "b", "nu", "density", "q", "ell", "seed"},
                        path.string());
    SimulationSpec spec;
    spec.n = j.at("n").get<int>();
    spec.m = j.at("m").get<int>();
    spec.d = j.at("d").get<int>();
    if (j.contains("family")) spec.family = j.at("family").get<std::string>();
    if (j.contains("a")) spec.a = j.at("a").get<double>();
    if (j.contains("b")) spec.b = j.at("b").get<double>();
    if (j.contains("nu")) spec.nu = j.at("nu").get<double>();
    if (j.contains("density")) spec.density = j.at("density").get<double>();
    if (j.contains("q")) spec.q = j.at("q").get<int>();
    if (j.contains("ell")) spec.ell = j.at("ell").get<int>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    spec.validate();
    return spec;
}

json simulation_spec_to_json(const SimulationSpec& spec) {
    json j;
    j["n"] = spec.n;
    j["m"] = spec.m;
    j["d"] = spec.d;
    j["family"] = spec.family;
    j["a"] = spec.a;
    j["b"] = spec.length_scale();
    j["nu"] = spec.nu;
    j["density"] = spec.density;
    j["q"] = spec.q;
    j["ell"] = spec.ell;
    j["seed"] = spec.seed;
    return j;
}

SamplerConfig parse_sampler_config(const fs::path& path) {
    const json j = parse_json_file(path);
    reject_unknown_keys(j,
                        {"d", "r", "sigma0", "a_lambda", "b_lambda", "n_warmup", "n_samples",
                         "thin", "seed", "fixed_lambda", "loss_multiplier"},
                        path.string());
    SamplerConfig config;
    config.d = j.at("d").get<int>();
    if (j.contains("r")) config.r = j.at("r").get<int>();
    if (j.contains("sigma0")) config.sigma0 = j.at("sigma0").get<double>();
    if (j.contains("a_lambda")) config.a_lambda = j.at("a_lambda").get<double>();
    if (j.contains("b_lambda")) config.b_lambda = j.at("b_lambda").get<double>();
    if (j.contains("n_warmup")) config.n_warmup = j.at("n_warmup").get<int>();
    if (j.contains("n_samples")) config.n_samples = j.at("n_samples").get<int>();
    if (j.contains("thin")) config.thin = j.at("thin").get<int>();
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("fixed_lambda") && !j.at("fixed_lambda").is_null()) {
        config.fixed_lambda = j.at("fixed_lambda").get<double>();
    }
    if (j.contains("loss_multiplier")) config.loss_multiplier = j.at("loss_multiplier").get<double>();
    config.validate();
    return config;
}

// The sidecar carries {n, m, labels?} next to an edge list.
std::pair<int, int> network_shape(const fs::path& network, std::optional<int> n,
                                  std::optional<int> m) {
    if (n && m) return {*n, *m};
    fs::path sidecar = network;
    sidecar += ".json";
    if (!fs::exists(sidecar)) {
        throw std::runtime_error("network shape unknown: pass --n/--m or provide " +
                                 sidecar.string());
    }
    const json j = parse_json_file(sidecar);
    reject_unknown_keys(j, {"n", "m", "labels"}, sidecar.string());
    return {n.value_or(j.at("n").get<int>()), m.value_or(j.at("m").get<int>())};
}

DynamicNetwork load_network(const fs::path& path, std::optional<int> n, std::optional<int> m) {
    const auto [nn, mm] = network_shape(path, n, m);
    DynamicNetwork net = load_edge_list(path, nn, mm);
    fs::path sidecar = path;
    sidecar += ".json";
    if (fs::exists(sidecar)) {
        const json j = parse_json_file(sidecar);
        if (j.contains("labels")) net.node_labels = j.at("labels").get<std::vector<std::string>>();
    }
    return net;
}

void write_manifest(const fs::path& path, const std::string& subcommand, const json& config,
                    const json& inputs, const json& outputs, std::uint64_t seed,
                    const json& counters = json::object()) {
    json manifest;
    manifest["subcommand"] = subcommand;
    manifest["config"] = config;
    manifest["inputs"] = inputs;
    manifest["outputs"] = outputs;
    manifest["seed"] = seed;
    manifest["version"] = kVersion;
    manifest["counters"] = counters;
    write_text_file(path, manifest.dump(2) + "\n");
}

struct StderrTimer {
    std::string label;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    ~StderrTimer() {
        const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
        std::cerr << label << ": " << elapsed.count() << " s\n";
    }
};

void run_one_simulation(const SimulationSpec& spec, const fs::path& dir) {
    fs::create_directories(dir);
    const SimulationResult result = simulate(spec);
    write_edge_list(result.network, dir / "network.el");
    json sidecar;
    sidecar["n"] = spec.n;
    sidecar["m"] = spec.m;
    write_text_file(dir / "network.el.json", sidecar.dump(2) + "\n");
    write_positions_csv(dir / "latents.csv", result.latents);
    json outputs = {{"network", "network.el"}, {"latents", "latents.csv"}};
    json counters;
    counters["rho"] = result.rho;
    counters["clamped"] = result.clamped;
    counters["edges"] = result.network.edge_count();
    write_manifest(dir / "manifest.json", "simulate", simulation_spec_to_json(spec),
                   json::object(), outputs, spec.seed, counters);
}

std::vector<MetricReport> evaluate_one(const EvaluateArgs& args, const std::string& rep_label,
                                       const fs::path* truth, const fs::path* network,
                                       const fs::path* embedding, const fs::path* draws_dir,
                                       const fs::path* forecast_path, json& extra_outputs);

}  // namespace

std::vector<fs::path> expand_glob(const std::string& pattern) {
    auto matches = [](const std::string& text, const std::string& pat) {
        // Greedy '*' match, linear scan.
        std::size_t t = 0, p = 0, star_p = std::string::npos, star_t = 0;
        while (t < text.size()) {
            if (p < pat.size() && (pat[p] == text[t])) {
                ++t, ++p;
            } else if (p < pat.size() && pat[p] == '*') {
                star_p = p++;
                star_t = t;
            } else if (star_p != std::string::npos) {
                p = star_p + 1;
                t = ++star_t;
            } else {
                return false;
            }
        }
        while (p < pat.size() && pat[p] == '*') ++p;
        return p == pat.size();
    };

    if (pattern.find('*') == std::string::npos) return {fs::path(pattern)};
    std::vector<fs::path> frontier;
    const fs::path pat(pattern);
    frontier.push_back(pat.is_absolute() ? fs::path("/") : fs::path("."));
    for (const auto& part : pat.relative_path()) {
        const std::string component = part.string();
        std::vector<fs::path> next;
        for (const auto& base : frontier) {
            if (component.find('*') == std::string::npos) {
                fs::path candidate = base / component;
                if (fs::exists(candidate)) next.push_back(std::move(candidate));
                continue;
            }
            if (!fs::is_directory(base)) continue;
            for (const auto& entry : fs::directory_iterator(base)) {
                if (matches(entry.path().filename().string(), component)) {
                    next.push_back(entry.path());
                }
            }
        }
        frontier = std::move(next);
    }
    std::sort(frontier.begin(), frontier.end());
    return frontier;
}

int cmd_simulate(const SimulateArgs& args) {
    StderrTimer timer{"simulate"};
    SimulationSpec spec = parse_simulation_spec(args.spec_file);
    if (args.seed) spec.seed = *args.seed;
    if (args.replicates < 1) throw std::runtime_error("simulate: --replicates must be >= 1");

    if (args.replicates == 1) {
        run_one_simulation(spec, args.out_dir);
        return 0;
    }
    std::vector<std::future<void>> futures;
    std::atomic<int> next{0};
    const int jobs = std::max(1, args.jobs);
    for (int w = 0; w < jobs; ++w) {
        futures.push_back(std::async(std::launch::async, [&]() {
            for (;;) {
                const int rep = next.fetch_add(1);
                if (rep >= args.replicates) return;
                SimulationSpec rep_spec = spec;
                rep_spec.seed = spec.seed + static_cast<std::uint64_t>(rep);
                char name[16];
                std::snprintf(name, sizeof(name), "rep%03d", rep);
                run_one_simulation(rep_spec, args.out_dir / name);
            }
        }));
    }
    for (auto& f : futures) f.get();
    return 0;
}

int cmd_fit(const FitArgs& args) {
    StderrTimer timer{"fit"};
    SamplerConfig config = parse_sampler_config(args.config_file);
    if (args.seed) config.seed = *args.seed;
    const DynamicNetwork net = load_network(args.network, args.n, args.m);

    fs::create_directories(args.out_dir);
    const fs::path marker = args.out_dir / ".partial";
    write_text_file(marker, "");

    const PosteriorDraws draws = run_chain(net, config);
    save_draws(draws, args.out_dir);

    json config_echo = parse_json_file(args.out_dir / "config.json");
    json inputs = {{"network", args.network.string()}};
    json outputs = {{"draws", "draws"}, {"reference", "reference.csv"}, {"trace", "trace.csv"}};
    json counters;
    counters["sweeps"] = config.n_warmup + config.n_samples * config.thin;
    counters["edges"] = net.edge_count();
    write_manifest(args.out_dir / "manifest.json", "fit", config_echo, inputs, outputs,
                   config.seed, counters);
    fs::remove(marker);
    return 0;
}

int cmd_forecast(const ForecastArgs& args) {
    StderrTimer timer{"forecast"};
    if (args.k < 1) throw std::runtime_error("forecast: --k must be >= 1");
    if (!(args.level > 0.0 && args.level < 1.0))
        throw std::runtime_error("forecast: --level must be in (0, 1)");
    const PosteriorDraws draws = load_draws(args.draws_dir);
    const Forecast fc = forecast_expectation(draws, args.k, draws.config.r, args.level, args.seed,
                                             args.clamp01);
    if (args.out_csv.has_parent_path()) fs::create_directories(args.out_csv.parent_path());
    write_forecast_csv(fc, args.out_csv);

    json config;
    config["k"] = args.k;
    config["level"] = args.level;
    config["clamp01"] = args.clamp01;
    config["r"] = draws.config.r;
    config["n_draws"] = fc.n_draws;
    fs::path manifest = args.out_csv;
    manifest += ".manifest.json";
    write_manifest(manifest, "forecast", config, {{"draws", args.draws_dir.string()}},
                   {{"forecast", args.out_csv.string()}}, args.seed);
    return 0;
}

int cmd_embed(const EmbedArgs& args) {
    StderrTimer timer{"embed"};
    const DynamicNetwork net = load_network(args.network, args.n, args.m);
    Embedding emb;
    if (args.method == "ase") {
        emb = ase_all(net, args.d);
    } else if (args.method == "omni") {
        emb = omni(net, args.d);
    } else if (args.method == "uase") {
        emb = uase(net, args.d);
    } else if (args.method == "mase") {
        emb = mase(net, args.d);
    } else {
        throw std::runtime_error("embed: unknown method \"" + args.method +
                                 "\" (expected ase|omni|uase|mase)");
    }
    if (args.out_csv.has_parent_path()) fs::create_directories(args.out_csv.parent_path());
    write_embedding_csv(emb, args.out_csv);

    json config;
    config["method"] = args.method;
    config["d"] = args.d;
    fs::path manifest = args.out_csv;
    manifest += ".manifest.json";
    write_manifest(manifest, "embed", config, {{"network", args.network.string()}},
                   {{"embedding", args.out_csv.string()}}, 0);
    return 0;
}

namespace {

// Average of X^(s) X^(s)T over draws, per time point.
std::vector<Eigen::MatrixXd> posterior_mean_grams(const PosteriorDraws& draws) {
    const int m = draws.m;
    std::vector<Eigen::MatrixXd> grams(m);
    for (int t = 0; t < m; ++t) {
        Eigen::MatrixXd acc =
            draws.draws.front().X[t] * draws.draws.front().X[t].transpose();
        for (std::size_t s = 1; s < draws.draws.size(); ++s) {
            acc.noalias() += draws.draws[s].X[t] * draws.draws[s].X[t].transpose();
        }
        grams[t] = acc / static_cast<double>(draws.draws.size());
    }
    return grams;
}

std::vector<MetricReport> evaluate_one(const EvaluateArgs& args, const std::string& rep_label,
                                       const fs::path* truth, const fs::path* network,
                                       const fs::path* embedding, const fs::path* draws_dir,
                                       const fs::path* forecast_path, json& extra_outputs) {
    std::vector<MetricReport> reports;

    std::optional<PosteriorDraws> draws;
    if (draws_dir) draws = load_draws(*draws_dir);
    std::optional<std::vector<Eigen::MatrixXd>> truth_latents;
    if (truth) truth_latents = read_positions_csv(*truth);
    std::optional<DynamicNetwork> net;
    if (network) {
        int n = 0, m = 0;
        if (draws) {
            n = draws->n;
            m = draws->m;
        }
        if (args.n) n = *args.n;
        if (args.m) m = *args.m;
        if (n == 0 || m == 0) {
            const auto [sn, sm] = network_shape(*network, args.n, args.m);
            n = sn;
            m = sm;
        }
        net = load_edge_list(*network, n, m);
    }
    std::optional<Embedding> emb;
    if (embedding) {
        emb = Embedding{};
        emb->method = "file";
        emb->positions = read_positions_csv(*embedding);
    }

    auto estimate_positions = [&]() -> std::vector<Eigen::MatrixXd> {
        if (emb) return emb->positions;
        if (draws) return posterior_mean(*draws);
        throw std::runtime_error("evaluate: metric needs --embedding or --draws");
    };
    auto estimate_grams = [&]() -> std::vector<Eigen::MatrixXd> {
        if (draws) return posterior_mean_grams(*draws);
        if (emb) {
            std::vector<Eigen::MatrixXd> grams;
            grams.reserve(emb->positions.size());
            for (std::size_t t = 0; t < emb->positions.size(); ++t)
                grams.push_back(emb->gram(static_cast<int>(t)));
            return grams;
        }
        throw std::runtime_error("evaluate: metric needs --embedding or --draws");
    };

    for (const std::string& metric : args.metrics) {
        try {
            if (metric == "rmse_latent") {
                if (!truth_latents) throw std::runtime_error("rmse_latent needs --truth");
                auto est = estimate_positions();
                if (truth_latents->size() < est.size())
                    throw std::runtime_error("rmse_latent: truth has fewer time points than estimate");
                std::vector<Eigen::MatrixXd> truth_slice(truth_latents->begin(),
                                                         truth_latents->begin() + est.size());
                reports.push_back({metric, rep_label, rmse_latent(truth_slice, est), ""});
            } else if (metric == "rmse_forecast") {
                if (!truth_latents || !forecast_path)
                    throw std::runtime_error("rmse_forecast needs --truth and --forecast");
                const Forecast fc = read_forecast_csv(*forecast_path);
                const int m_insample = draws ? draws->m
                                             : static_cast<int>(truth_latents->size()) - fc.horizon;
                for (int k = 1; k <= fc.horizon; ++k) {
                    if (m_insample + k > static_cast<int>(truth_latents->size())) {
                        throw std::runtime_error("rmse_forecast: truth latents end before step " +
                                                 std::to_string(k));
                    }
                    const double v = rmse_forecast((*truth_latents)[m_insample + k - 1], fc, k);
                    reports.push_back({metric + "_k" + std::to_string(k), rep_label, v, ""});
                }
            } else if (metric == "auc" || metric == "aupr") {
                if (!net) throw std::runtime_error(metric + " needs --network");
                std::vector<double> scores;
                std::vector<int> labels;
                ranking_data(*net, estimate_grams(), scores, labels);
                const double v = metric == "auc" ? auc(scores, labels) : aupr(scores, labels);
                reports.push_back({metric, rep_label, v, ""});
            } else if (metric == "degree_gof") {
                if (!net || !draws) throw std::runtime_error("degree_gof needs --network and --draws");
                const DegreeGof gof = degree_gof(*draws, *net, args.gof_sims, args.seed);
                std::string csv = "degree,lower,median,upper,observed\n";
                int inside = 0;
                for (std::size_t g = 0; g < gof.degrees.size(); ++g) {
                    csv += std::to_string(gof.degrees[g]) + ',' + format_double(gof.lower[g]) + ',' +
                           format_double(gof.median[g]) + ',' + format_double(gof.upper[g]) + ',' +
                           std::to_string(gof.observed[g]) + '\n';
                    inside += (gof.observed[g] >= gof.lower[g] && gof.observed[g] <= gof.upper[g]);
                }
                fs::path gof_path = args.out_csv;
                gof_path.replace_extension("");
                gof_path += "_degree_gof";
                if (!rep_label.empty() && rep_label != "0") gof_path += "_" + rep_label;
                gof_path += ".csv";
                write_text_file(gof_path, csv);
                extra_outputs["degree_gof"] = gof_path.string();
                reports.push_back({"degree_gof_coverage", rep_label,
                                   static_cast<double>(inside) / gof.degrees.size(), ""});
            } else {
                throw std::runtime_error("unknown metric \"" + metric + "\"");
            }
        } catch (const std::exception& e) {
            reports.push_back({metric, rep_label, std::nan(""), e.what()});
        }
    }
    return reports;
}

}  // namespace

int cmd_evaluate(const EvaluateArgs& args) {
    StderrTimer timer{"evaluate"};
    if (args.metrics.empty()) throw std::runtime_error("evaluate: no metrics requested");

    auto expand = [](const std::string& pattern) {
        std::vector<fs::path> paths;
        if (!pattern.empty()) {
            paths = expand_glob(pattern);
            if (paths.empty()) throw std::runtime_error("evaluate: no matches for " + pattern);
        }
        return paths;
    };
    const auto truths = expand(args.truth);
    const auto networks = expand(args.network);
    const auto embeddings = expand(args.embedding);
    const auto draw_dirs = expand(args.draws);
    const auto forecasts = expand(args.forecast);

    std::size_t n_reps = 1;
    for (const auto* v : {&truths, &networks, &embeddings, &draw_dirs, &forecasts}) {
        n_reps = std::max(n_reps, v->size());
    }
    auto pick = [&](const std::vector<fs::path>& v, std::size_t rep) -> const fs::path* {
        if (v.empty()) return nullptr;
        if (v.size() == 1) return &v[0];
        if (v.size() != n_reps)
            throw std::runtime_error("evaluate: glob expansions have mismatched lengths");
        return &v[rep];
    };

    std::vector<MetricReport> all;
    json extra_outputs = json::object();
    for (std::size_t rep = 0; rep < n_reps; ++rep) {
        const std::string label = std::to_string(rep);
        auto reports = evaluate_one(args, label, pick(truths, rep), pick(networks, rep),
                                    pick(embeddings, rep), pick(draw_dirs, rep),
                                    pick(forecasts, rep), extra_outputs);
        all.insert(all.end(), reports.begin(), reports.end());
    }

    // Mean +- SD rollup across replicates per metric.
    if (n_reps > 1) {
        std::map<std::string, std::vector<double>> by_metric;
        for (const auto& r : all) {
            if (r.error.empty()) by_metric[r.metric].push_back(r.value);
        }
        for (const auto& [metric, values] : by_metric) {
            const double mean =
                std::accumulate(values.begin(), values.end(), 0.0) / values.size();
            double sd = 0.0;
            if (values.size() > 1) {
                for (double v : values) sd += (v - mean) * (v - mean);
                sd = std::sqrt(sd / (values.size() - 1.0));
            }
            all.push_back({metric, "mean", mean, ""});
            all.push_back({metric, "sd", sd, ""});
        }
    }

    if (args.out_csv.has_parent_path()) fs::create_directories(args.out_csv.parent_path());
    write_metrics_csv(all, args.out_csv);

    json config;
    config["metrics"] = args.metrics;
    config["gof_sims"] = args.gof_sims;
    json inputs;
    if (!args.truth.empty()) inputs["truth"] = args.truth;
    if (!args.network.empty()) inputs["network"] = args.network;
    if (!args.embedding.empty()) inputs["embedding"] = args.embedding;
    if (!args.draws.empty()) inputs["draws"] = args.draws;
    if (!args.forecast.empty()) inputs["forecast"] = args.forecast;
    json outputs = {{"metrics", args.out_csv.string()}};
    for (const auto& [k, v] : extra_outputs.items()) outputs[k] = v;
    fs::path manifest = args.out_csv;
    manifest += ".manifest.json";
    write_manifest(manifest, "evaluate", config, inputs, outputs, args.seed);
    return 0;
}

}  // namespace gbdase::cli
