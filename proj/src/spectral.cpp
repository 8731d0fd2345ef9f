#include "gbdase/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gbdase/io.hpp"

namespace gbdase {

namespace {

void check_finite(const Eigen::MatrixXd& X, const char* where) {
    if (!X.allFinite()) throw std::runtime_error(std::string(where) + ": non-finite entries");
}

// Embedding from the d algebraically largest eigenpairs of a symmetric
// matrix already decomposed by `es`. Columns ordered by descending
// eigenvalue; ties keep the solver's ascending eigenvector index.
Eigen::MatrixXd top_eigpairs_embedding(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es,
                                       int d) {
    const auto& evals = es.eigenvalues();  // ascending
    const auto& evecs = es.eigenvectors();
    const int n = static_cast<int>(evals.size());
    Eigen::MatrixXd X(evecs.rows(), d);
    for (int k = 0; k < d; ++k) {
        const int idx = n - 1 - k;
        const double lam = std::max(0.0, evals[idx]);
        X.col(k) = evecs.col(idx) * std::sqrt(lam);
    }
    return X;
}

}  // namespace

Eigen::MatrixXd Embedding::gram(int t) const {
    if (has_scores()) {
        const auto& V = positions.at(t);
        return V * scores.at(t) * V.transpose();
    }
    const auto& X = positions.at(t);
    return X * X.transpose();
}

Eigen::MatrixXd dense_adjacency(const DynamicNetwork& net, int t) {
    const int n = net.node_count();
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (const auto& [j, w] : net.neighbors(i, t)) Y(i, j) = w;
    }
    return Y;
}

Eigen::MatrixXd ase(const Eigen::MatrixXd& Y, int d) {
    const int n = static_cast<int>(Y.rows());
    if (Y.cols() != n) throw std::invalid_argument("ase: input must be square");
    if (d < 1 || d > n) throw std::invalid_argument("ase: need 1 <= d <= n");
    const double asym = (Y - Y.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10) throw std::invalid_argument("ase: input is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Y);
    if (es.info() != Eigen::Success) throw std::runtime_error("ase: eigendecomposition failed");
    Eigen::MatrixXd X = top_eigpairs_embedding(es, d);
    check_finite(X, "ase");
    return X;
}

Embedding ase_all(const DynamicNetwork& net, int d) {
    Embedding emb;
    emb.method = "ase";
    emb.positions.reserve(net.time_count());
    for (int t = 0; t < net.time_count(); ++t) emb.positions.push_back(ase(dense_adjacency(net, t), d));
    return emb;
}

Embedding omni(const DynamicNetwork& net, int d) {
    const int n = net.node_count();
    const int m = net.time_count();
    const long long mn = static_cast<long long>(m) * n;
    if (mn > 12000) {
        throw std::invalid_argument("omni: omnibus dimension " + std::to_string(mn) +
                                    " exceeds the dense eigendecomposition guard (12000)");
    }
    std::vector<Eigen::MatrixXd> slices;
    slices.reserve(m);
    for (int t = 0; t < m; ++t) slices.push_back(dense_adjacency(net, t));

    Eigen::MatrixXd M(mn, mn);
    for (int t = 0; t < m; ++t) {
        for (int s = 0; s < m; ++s) {
            M.block(t * n, s * n, n, n) = 0.5 * (slices[t] + slices[s]);
        }
    }
    const Eigen::MatrixXd X = ase(M, d);
    Embedding emb;
    emb.method = "omni";
    emb.positions.reserve(m);
    for (int t = 0; t < m; ++t) emb.positions.push_back(X.middleRows(t * n, n));
    return emb;
}

Embedding uase(const DynamicNetwork& net, int d) {
    const int n = net.node_count();
    const int m = net.time_count();
    if (d < 1 || d > n) throw std::invalid_argument("uase: need 1 <= d <= min(n, nm)");
    Eigen::MatrixXd A(n, static_cast<Eigen::Index>(n) * m);
    for (int t = 0; t < m; ++t) A.middleCols(t * n, n) = dense_adjacency(net, t);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Embedding emb;
    emb.method = "uase";
    emb.positions.reserve(m);
    // Right factor carries the time-varying positions.
    for (int t = 0; t < m; ++t) {
        Eigen::MatrixXd Xt(n, d);
        for (int k = 0; k < d; ++k) {
            Xt.col(k) = svd.matrixV().col(k).segment(t * n, n) * std::sqrt(sv[k]);
        }
        check_finite(Xt, "uase");
        emb.positions.push_back(std::move(Xt));
    }
    return emb;
}

Embedding mase(const DynamicNetwork& net, int d) {
    const int n = net.node_count();
    const int m = net.time_count();
    if (d < 1 || d > n) throw std::invalid_argument("mase: need 1 <= d <= n");
    Eigen::MatrixXd C(n, static_cast<Eigen::Index>(m) * d);
    std::vector<Eigen::MatrixXd> slices;
    slices.reserve(m);
    for (int t = 0; t < m; ++t) {
        slices.push_back(dense_adjacency(net, t));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(slices.back());
        if (es.info() != Eigen::Success) throw std::runtime_error("mase: eigendecomposition failed");
        // Unscaled eigenvector basis of the d algebraically largest pairs.
        for (int k = 0; k < d; ++k) C.col(t * d + k) = es.eigenvectors().col(n - 1 - k);
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeThinU);
    const Eigen::MatrixXd V = svd.matrixU().leftCols(d);
    Embedding emb;
    emb.method = "mase";
    emb.positions.assign(m, V);
    emb.scores.reserve(m);
    for (int t = 0; t < m; ++t) emb.scores.push_back(V.transpose() * slices[t] * V);
    return emb;
}

Eigen::MatrixXd procrustes(const Eigen::MatrixXd& X, const Eigen::MatrixXd& X_ref) {
    if (X.rows() != X_ref.rows() || X.cols() != X_ref.cols())
        throw std::invalid_argument("procrustes: shape mismatch");
    const Eigen::MatrixXd M = X.transpose() * X_ref;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

void sequential_align(std::vector<Eigen::MatrixXd>& positions) {
    for (std::size_t t = 1; t < positions.size(); ++t) {
        positions[t] = positions[t] * procrustes(positions[t], positions[t - 1]);
    }
}

void write_embedding_csv(const Embedding& emb, const std::filesystem::path& path) {
    write_positions_csv(path, emb.positions);
    if (emb.has_scores()) {
        // MASE scores go in a sidecar: rows (t, a, b, value).
        std::filesystem::path score_path = path;
        score_path.replace_extension(".scores.csv");
        std::string out = "t,a,b,value\n";
        for (std::size_t t = 0; t < emb.scores.size(); ++t) {
            const auto& R = emb.scores[t];
            for (Eigen::Index a = 0; a < R.rows(); ++a) {
                for (Eigen::Index b = 0; b < R.cols(); ++b) {
                    out += std::to_string(t + 1) + ',' + std::to_string(a) + ',' +
                           std::to_string(b) + ',' + format_double(R(a, b)) + '\n';
                }
            }
        }
        write_text_file(score_path, out);
    }
}

}  // namespace gbdase
