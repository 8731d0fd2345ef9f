#include "gbdase/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gbdase {

void write_positions_csv(const std::filesystem::path& path,
                         const std::vector<Eigen::MatrixXd>& positions) {
    if (positions.empty()) throw std::invalid_argument("write_positions_csv: no time points");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_positions_csv: cannot open " + path.string());
    const auto d = positions.front().cols();
    out << "t,i";
    for (Eigen::Index k = 0; k < d; ++k) out << ",x" << k;
    out << '\n';
    for (std::size_t t = 0; t < positions.size(); ++t) {
        const auto& X = positions[t];
        if (X.cols() != d) throw std::invalid_argument("write_positions_csv: inconsistent dimension");
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            out << (t + 1) << ',' << i;
            for (Eigen::Index k = 0; k < d; ++k) out << ',' << format_double(X(i, k));
            out << '\n';
        }
    }
}

std::vector<Eigen::MatrixXd> read_positions_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_positions_csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_positions_csv: empty file " + path.string());
    int d = -2;  // header columns minus t,i
    for (char c : line)
        if (c == ',') ++d;
    ++d;
    if (d < 1) throw std::runtime_error("read_positions_csv: bad header in " + path.string());

    struct Row {
        int t, i;
        std::vector<double> x;
    };
    std::vector<Row> rows;
    int lineno = 1;
    int max_t = 0, max_i = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::istringstream ss(line);
        Row r;
        char comma;
        if (!(ss >> r.t >> comma >> r.i)) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": malformed row");
        }
        r.x.resize(d);
        for (int k = 0; k < d; ++k) {
            if (!(ss >> comma >> r.x[k])) {
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": expected " + std::to_string(d) + " coordinates");
            }
        }
        if (r.t < 1 || r.i < 0) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad indices");
        }
        max_t = std::max(max_t, r.t);
        max_i = std::max(max_i, r.i);
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw std::runtime_error("read_positions_csv: no data rows in " + path.string());
    std::vector<Eigen::MatrixXd> out(max_t, Eigen::MatrixXd::Zero(max_i + 1, d));
    for (const auto& r : rows) {
        for (int k = 0; k < d; ++k) out[r.t - 1](r.i, k) = r.x[k];
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_text_file: cannot open " + path.string());
    out << content;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_text_file: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace gbdase
