#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace gbdase {

// Operation counters for the banded kernel, accumulated per thread. Tests
// and the sampler's per-sweep cost accounting read and reset these; they
// count fused multiply-adds rather than wall time.
struct BandedOpCounts {
    std::uint64_t factor_fma = 0;
    std::uint64_t solve_fma = 0;
    void reset() { factor_fma = solve_fma = 0; }
};

BandedOpCounts& banded_op_counts();

// Symmetric banded matrix stored as the lower triangle by diagonal:
// band k holds A(j + k, j) for columns j = 0 .. dim-1-k. Entries with
// |row - col| > bandwidth are identically zero.
class BandedMatrix {
public:
    BandedMatrix(int dim, int bandwidth);

    int dim() const { return dim_; }
    int bandwidth() const { return bw_; }

    // Band k (0 = main diagonal), column j: entry A(j + k, j).
    double& at(int k, int j) { return bands_[static_cast<std::size_t>(k) * dim_ + j]; }
    double at(int k, int j) const { return bands_[static_cast<std::size_t>(k) * dim_ + j]; }

    // Symmetric element lookup; 0 outside the band.
    double get(int i, int j) const;

    // this += s * other; other's bandwidth must not exceed ours.
    void add_scaled(const BandedMatrix& other, double s);

    void set_zero();

    Eigen::MatrixXd dense() const;

    const std::vector<double>& raw() const { return bands_; }

private:
    int dim_, bw_;
    std::vector<double> bands_;
};

// Lower-banded Cholesky factor L with L L^T reconstructing the input.
class BandedCholesky {
public:
    BandedCholesky(int dim, int bandwidth) : storage_(dim, bandwidth) {}

    int dim() const { return storage_.dim(); }
    int bandwidth() const { return storage_.bandwidth(); }
    double& at(int k, int j) { return storage_.at(k, j); }
    double at(int k, int j) const { return storage_.at(k, j); }

    // L(i, j); 0 above the diagonal or outside the band.
    double entry(int i, int j) const;

    Eigen::MatrixXd dense() const;

private:
    BandedMatrix storage_;
};

// Band Cholesky factorization. Inputs are SPD by construction in the
// sampler; a pivot below 1e-12 * max diagonal is reported as an error
// naming the failing index, never repaired.
BandedCholesky cholesky_banded(const BandedMatrix& A);

// In-place variant reusing a preallocated factor (same dim/bandwidth).
void cholesky_banded(const BandedMatrix& A, BandedCholesky& factor);

// Solve L L^T x = b by forward- then back-substitution.
Eigen::VectorXd solve_banded(const BandedCholesky& F, const Eigen::VectorXd& b);

// Solve L^T u = z; for z ~ N(0, I) this yields u ~ N(0, (L L^T)^{-1}).
Eigen::VectorXd solve_lower_transpose(const BandedCholesky& F, const Eigen::VectorXd& z);

}  // namespace gbdase
