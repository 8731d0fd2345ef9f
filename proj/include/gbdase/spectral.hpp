#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "gbdase/dyngraph.hpp"

namespace gbdase {

// Latent-position estimate from a spectral method. For ASE/OMNI/UASE the
// per-time n x d position matrices carry everything; MASE instead shares an
// invariant basis V (stored in positions) with per-time d x d score matrices
// R^(t), so its edge estimate is V R^(t) V^T.
struct Embedding {
    std::string method;
    std::vector<Eigen::MatrixXd> positions;  // m (or 1) matrices, n x d
    std::vector<Eigen::MatrixXd> scores;     // MASE only: m matrices, d x d

    bool has_scores() const { return !scores.empty(); }

    // Estimated edge-expectation matrix at time t.
    Eigen::MatrixXd gram(int t) const;
};

// Dense symmetric adjacency matrix of one network slice.
Eigen::MatrixXd dense_adjacency(const DynamicNetwork& net, int t);

// Adjacency spectral embedding: X = U_d Lambda_d^{1/2} from the d
// algebraically largest eigenpairs, negative eigenvalues clipped to zero.
Eigen::MatrixXd ase(const Eigen::MatrixXd& Y, int d);

// Per-time ASE applied separately to each slice.
Embedding ase_all(const DynamicNetwork& net, int d);

// ASE of the mn x mn omnibus matrix with (t, s) block (Y_t + Y_s) / 2,
// split into m per-time blocks. Guarded to mn <= 12000.
Embedding omni(const DynamicNetwork& net, int d);

// SVD of the n x nm column-concatenated unfolding; the per-time embedding
// is the t-th n x d block of the right factor scaled by singular
// values^{1/2}.
Embedding uase(const DynamicNetwork& net, int d);

// Joint invariant-subspace embedding: per-time ASE eigenvector bases are
// column-concatenated (unscaled), V = leading d left singular vectors,
// R^(t) = V^T Y_t V.
Embedding mase(const DynamicNetwork& net, int d);

// Orthogonal W minimizing ||X W - X_ref||_F, via SVD of X^T X_ref.
Eigen::MatrixXd procrustes(const Eigen::MatrixXd& X, const Eigen::MatrixXd& X_ref);

// Rotate X_t onto X_{t-1} sequentially, leaving X_1 and all Gram matrices
// unchanged.
void sequential_align(std::vector<Eigen::MatrixXd>& positions);

void write_embedding_csv(const Embedding& emb, const std::filesystem::path& path);

}  // namespace gbdase
