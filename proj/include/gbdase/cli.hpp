#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gbdase::cli {

inline constexpr const char* kVersion = "0.1.0";

// Every subcommand is a pure function of (inputs, config, seed): reruns
// reproduce outputs byte-for-byte, and each run writes one manifest.
// Timing goes to stderr, never into the output tree.

struct SimulateArgs {
    std::filesystem::path spec_file;
    std::filesystem::path out_dir;
    int replicates = 1;
    int jobs = 1;
    std::optional<std::uint64_t> seed;  // overrides the seed in the spec file
};

struct FitArgs {
    std::filesystem::path network;
    std::filesystem::path config_file;
    std::filesystem::path out_dir;
    std::optional<int> n, m;            // fall back to the network's JSON sidecar
    std::optional<std::uint64_t> seed;  // overrides the config's seed
};

struct ForecastArgs {
    std::filesystem::path draws_dir;
    std::filesystem::path out_csv;
    int k = 1;
    double level = 0.95;
    std::uint64_t seed = 0;
    bool clamp01 = false;
};

struct EmbedArgs {
    std::filesystem::path network;
    std::filesystem::path out_csv;
    std::string method = "ase";  // ase | omni | uase | mase
    int d = 2;
    std::optional<int> n, m;
};

struct EvaluateArgs {
    std::string truth;      // latents CSV path or glob
    std::string network;    // edge list path or glob
    std::string embedding;  // embedding CSV path or glob
    std::string draws;      // draws directory path or glob
    std::string forecast;   // forecast CSV path or glob
    std::vector<std::string> metrics;
    std::filesystem::path out_csv;
    std::optional<int> n, m;
    int gof_sims = 100;
    std::uint64_t seed = 0;
};

int cmd_simulate(const SimulateArgs& args);
int cmd_fit(const FitArgs& args);
int cmd_forecast(const ForecastArgs& args);
int cmd_embed(const EmbedArgs& args);
int cmd_evaluate(const EvaluateArgs& args);

// Minimal glob: '*' wildcards within path components, no '**'.
std::vector<std::filesystem::path> expand_glob(const std::string& pattern);

}  // namespace gbdase::cli
