#include "gbdase/dyngraph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gbdase/io.hpp"

namespace gbdase {

DynamicNetwork::DynamicNetwork(int n, int m) : n_(n), m_(m) {
    if (n < 1 || m < 1) throw std::invalid_argument("DynamicNetwork: need n >= 1 and m >= 1");
    nbr_.assign(m, std::vector<std::vector<std::pair<int, double>>>(n));
}

void DynamicNetwork::add_edge(int i, int j, int t, double w) {
    if (t < 0 || t >= m_) throw std::out_of_range("add_edge: time index out of range");
    if (i < 0 || i >= n_ || j < 0 || j >= n_) throw std::out_of_range("add_edge: node index out of range");
    if (i == j) throw std::invalid_argument("add_edge: self-loops are not allowed (hollow network)");
    if (w == 0.0) return;
    auto& row = nbr_[t][i];
    auto pos = std::lower_bound(row.begin(), row.end(), j,
                                [](const auto& p, int v) { return p.first < v; });
    if (pos != row.end() && pos->first == j) {
        throw std::invalid_argument("add_edge: duplicate edge (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ") at time " + std::to_string(t + 1));
    }
    row.insert(pos, {j, w});
    auto& mirror = nbr_[t][j];
    auto mpos = std::lower_bound(mirror.begin(), mirror.end(), i,
                                 [](const auto& p, int v) { return p.first < v; });
    mirror.insert(mpos, {i, w});
    ++edge_count_;
    sum_sq_ += 2.0 * w * w;
    sum_w_ += w;
}

double DynamicNetwork::value(int i, int j, int t) const {
    if (t < 0 || t >= m_) throw std::out_of_range("value: time index out of range");
    if (i < 0 || i >= n_ || j < 0 || j >= n_) throw std::out_of_range("value: node index out of range");
    if (i == j) return 0.0;
    const auto& row = nbr_[t][i];
    auto pos = std::lower_bound(row.begin(), row.end(), j,
                                [](const auto& p, int v) { return p.first < v; });
    return (pos != row.end() && pos->first == j) ? pos->second : 0.0;
}

std::span<const std::pair<int, double>> DynamicNetwork::neighbors(int i, int t) const {
    return nbr_[t][i];
}

DynamicNetwork load_edge_list(const std::filesystem::path& path, int n, int m) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_edge_list: cannot open " + path.string());
    DynamicNetwork net(n, m);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::istringstream ss(line);
        long long i, j, t;
        double w;
        if (!(ss >> i >> j >> t >> w)) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": malformed edge line: \"" + line + "\"");
        }
        std::string extra;
        if (ss >> extra) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": trailing tokens on edge line");
        }
        if (t < 1 || t > m) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": time index " + std::to_string(t) + " outside 1.." +
                                     std::to_string(m));
        }
        if (i < 0 || i >= n || j < 0 || j >= n) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": node index outside 0.." + std::to_string(n - 1));
        }
        try {
            net.add_edge(static_cast<int>(i), static_cast<int>(j), static_cast<int>(t - 1), w);
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return net;
}

void write_edge_list(const DynamicNetwork& net, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_edge_list: cannot open " + path.string());
    for (int t = 0; t < net.time_count(); ++t) {
        for (int i = 0; i < net.node_count(); ++i) {
            for (const auto& [j, w] : net.neighbors(i, t)) {
                if (j > i) {
                    out << i << ' ' << j << ' ' << (t + 1) << ' ' << format_double(w) << '\n';
                }
            }
        }
    }
}

double density(const DynamicNetwork& net) {
    const double n = net.node_count();
    if (n < 2) throw std::invalid_argument("density: need n >= 2");
    const double dyads = net.time_count() * n * (n - 1) / 2.0;
    return static_cast<double>(net.edge_count()) / dyads;
}

std::map<int, std::int64_t> degree_counts(const DynamicNetwork& net) {
    std::map<int, std::int64_t> counts;
    for (int t = 0; t < net.time_count(); ++t) {
        for (int i = 0; i < net.node_count(); ++i) {
            counts[static_cast<int>(net.neighbors(i, t).size())] += 1;
        }
    }
    return counts;
}

}  // namespace gbdase
