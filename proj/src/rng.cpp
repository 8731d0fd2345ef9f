#include "gbdase/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace gbdase {

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Marsaglia polar method.
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
}

double Rng::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) {
        throw std::invalid_argument("Rng::gamma: shape and rate must be positive");
    }
    if (shape < 1.0) {
        // G(a) = G(a+1) * U^{1/a}
        const double u = uniform();
        return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

std::vector<double> Rng::dirichlet(double alpha, int k) {
    std::vector<double> w(k);
    double total = 0.0;
    for (int j = 0; j < k; ++j) {
        w[j] = gamma(alpha, 1.0);
        total += w[j];
    }
    for (int j = 0; j < k; ++j) w[j] /= total;
    return w;
}

}  // namespace gbdase
