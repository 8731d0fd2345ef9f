#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gbdase {

// Sparse symmetric hollow dynamic network on n nodes and m time points.
// Edges are stored once per unordered dyad and mirrored into per-(node, time)
// neighborhood lists. Read-only after construction; safe for concurrent reads.
class DynamicNetwork {
public:
    DynamicNetwork(int n, int m);

    // i != j, 0-based indices, t in [0, m). Zero weights are ignored,
    // duplicates (in either orientation) are an error.
    void add_edge(int i, int j, int t, double w);

    int node_count() const { return n_; }
    int time_count() const { return m_; }
    std::int64_t edge_count() const { return edge_count_; }

    // y_ij,t; 0 for unstored dyads and for i == j.
    double value(int i, int j, int t) const;

    // (j, y_ij,t) pairs sorted by j.
    std::span<const std::pair<int, double>> neighbors(int i, int t) const;

    // Full-matrix sum of y^2 (each dyad counted twice by symmetry).
    double sum_squared_weights() const { return sum_sq_; }

    // Per-dyad sum of y (each dyad counted once).
    double sum_weights() const { return sum_w_; }

    std::vector<std::string> node_labels;

private:
    int n_, m_;
    std::int64_t edge_count_ = 0;
    double sum_sq_ = 0.0;
    double sum_w_ = 0.0;
    std::vector<std::vector<std::vector<std::pair<int, double>>>> nbr_;  // [t][i]
};

// Text format: one "i j t w" line per edge, i,j 0-based, t 1-based,
// whitespace separated. Lines with w = 0 are dropped.
DynamicNetwork load_edge_list(const std::filesystem::path& path, int n, int m);
void write_edge_list(const DynamicNetwork& net, const std::filesystem::path& path);

// Fraction of nonzero dyads among m * n(n-1)/2.
double density(const DynamicNetwork& net);

// Histogram over all (i, t) of |N_it|; counts sum to n * m.
std::map<int, std::int64_t> degree_counts(const DynamicNetwork& net);

}  // namespace gbdase
