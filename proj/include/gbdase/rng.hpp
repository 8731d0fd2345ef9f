#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gbdase {

// Random generator with hand-rolled distributions on top of mt19937_64.
// The standard fixes the mt19937_64 bit stream, so draws are reproducible
// across platforms and standard-library versions; one instance per chain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // U(0,1), endpoints excluded.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
    }

    double normal();

    // Gamma(shape, rate) via Marsaglia-Tsang, with the boost trick for
    // shape < 1.
    double gamma(double shape, double rate);

    double inverse_gamma(double shape, double rate) { return 1.0 / gamma(shape, rate); }

    bool bernoulli(double p) { return uniform() < p; }

    std::vector<double> dirichlet(double alpha, int k);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace gbdase
