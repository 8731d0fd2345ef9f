#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace gbdase {

// Shortest text form that round-trips a double exactly. Used by every file
// writer so that identical runs produce byte-identical output.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Latent-position / embedding CSV: header "t,i,x0,...", one row per (t, i)
// with 1-based time indices. Shared by simulation truth files, embedding
// output, and posterior draw positions.
void write_positions_csv(const std::filesystem::path& path,
                         const std::vector<Eigen::MatrixXd>& positions);

std::vector<Eigen::MatrixXd> read_positions_csv(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace gbdase
