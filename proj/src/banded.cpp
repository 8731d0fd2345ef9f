#include "gbdase/banded.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gbdase {

BandedOpCounts& banded_op_counts() {
    thread_local BandedOpCounts counts;
    return counts;
}

BandedMatrix::BandedMatrix(int dim, int bandwidth) : dim_(dim), bw_(bandwidth) {
    if (dim < 1) throw std::invalid_argument("BandedMatrix: dim must be positive");
    if (bandwidth < 0 || bandwidth >= dim)
        throw std::invalid_argument("BandedMatrix: bandwidth must be in [0, dim)");
    bands_.assign(static_cast<std::size_t>(bw_ + 1) * dim_, 0.0);
}

double BandedMatrix::get(int i, int j) const {
    if (i < j) std::swap(i, j);
    const int k = i - j;
    if (k > bw_) return 0.0;
    return at(k, j);
}

void BandedMatrix::add_scaled(const BandedMatrix& other, double s) {
    if (other.dim_ != dim_) throw std::invalid_argument("add_scaled: dimension mismatch");
    if (other.bw_ > bw_) throw std::invalid_argument("add_scaled: bandwidth exceeds target");
    for (int k = 0; k <= other.bw_; ++k) {
        const double* src = other.bands_.data() + static_cast<std::size_t>(k) * dim_;
        double* dst = bands_.data() + static_cast<std::size_t>(k) * dim_;
        for (int j = 0; j < dim_ - k; ++j) dst[j] += s * src[j];
    }
}

void BandedMatrix::set_zero() { std::fill(bands_.begin(), bands_.end(), 0.0); }

Eigen::MatrixXd BandedMatrix::dense() const {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim_, dim_);
    for (int k = 0; k <= bw_; ++k) {
        for (int j = 0; j < dim_ - k; ++j) {
            A(j + k, j) = at(k, j);
            A(j, j + k) = at(k, j);
        }
    }
    return A;
}

double BandedCholesky::entry(int i, int j) const {
    if (i < j || i - j > bandwidth()) return 0.0;
    return at(i - j, j);
}

Eigen::MatrixXd BandedCholesky::dense() const {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(dim(), dim());
    for (int k = 0; k <= bandwidth(); ++k) {
        for (int j = 0; j < dim() - k; ++j) L(j + k, j) = at(k, j);
    }
    return L;
}

void cholesky_banded(const BandedMatrix& A, BandedCholesky& factor) {
    const int n = A.dim();
    const int p = A.bandwidth();
    if (factor.dim() != n || factor.bandwidth() != p)
        throw std::invalid_argument("cholesky_banded: factor shape mismatch");
    auto& ops = banded_op_counts();

    double max_diag = 0.0;
    for (int j = 0; j < n; ++j) max_diag = std::max(max_diag, std::abs(A.at(0, j)));
    const double pivot_tol = 1e-12 * max_diag;

    // Work column by column on a copy of the lower band (Golub & Van Loan
    // band Cholesky; unit-stride inner loops over the compact layout).
    for (int k = 0; k <= p; ++k) {
        for (int j = 0; j < n - k; ++j) factor.at(k, j) = A.at(k, j);
    }
    for (int j = 0; j < n; ++j) {
        const int k0 = std::max(0, j - p);
        for (int k = k0; k < j; ++k) {
            const double ljk = factor.at(j - k, k);
            if (ljk == 0.0) continue;
            const int last = std::min(n - 1, k + p);  // column k ends at row k+p
            for (int i = j; i <= last; ++i) {
                factor.at(i - j, j) -= ljk * factor.at(i - k, k);
            }
            ops.factor_fma += static_cast<std::uint64_t>(last - j + 1);
        }
        const double pivot = factor.at(0, j);
        if (!(pivot > pivot_tol)) {
            throw std::runtime_error("cholesky_banded: not positive definite at index " +
                                     std::to_string(j) + " (pivot " + std::to_string(pivot) + ")");
        }
        const double root = std::sqrt(pivot);
        factor.at(0, j) = root;
        const double inv = 1.0 / root;
        const int last = std::min(n - 1, j + p);
        for (int i = j + 1; i <= last; ++i) factor.at(i - j, j) *= inv;
        ops.factor_fma += static_cast<std::uint64_t>(last - j);
    }
}

BandedCholesky cholesky_banded(const BandedMatrix& A) {
    BandedCholesky factor(A.dim(), A.bandwidth());
    cholesky_banded(A, factor);
    return factor;
}

namespace {

void forward_substitute(const BandedCholesky& F, Eigen::VectorXd& x) {
    const int n = F.dim();
    const int p = F.bandwidth();
    auto& ops = banded_op_counts();
    for (int j = 0; j < n; ++j) {
        x[j] /= F.at(0, j);
        const double xj = x[j];
        const int last = std::min(n - 1, j + p);
        for (int i = j + 1; i <= last; ++i) x[i] -= F.at(i - j, j) * xj;
        ops.solve_fma += static_cast<std::uint64_t>(last - j);
    }
}

void backward_substitute(const BandedCholesky& F, Eigen::VectorXd& x) {
    const int n = F.dim();
    const int p = F.bandwidth();
    auto& ops = banded_op_counts();
    for (int i = n - 1; i >= 0; --i) {
        double acc = x[i];
        const int last = std::min(n - 1, i + p);
        for (int k = i + 1; k <= last; ++k) acc -= F.at(k - i, i) * x[k];
        ops.solve_fma += static_cast<std::uint64_t>(last - i);
        x[i] = acc / F.at(0, i);
    }
}

}  // namespace

Eigen::VectorXd solve_banded(const BandedCholesky& F, const Eigen::VectorXd& b) {
    if (b.size() != F.dim()) throw std::invalid_argument("solve_banded: dimension mismatch");
    Eigen::VectorXd x = b;
    forward_substitute(F, x);
    backward_substitute(F, x);
    return x;
}

Eigen::VectorXd solve_lower_transpose(const BandedCholesky& F, const Eigen::VectorXd& z) {
    if (z.size() != F.dim())
        throw std::invalid_argument("solve_lower_transpose: dimension mismatch");
    Eigen::VectorXd u = z;
    backward_substitute(F, u);
    return u;
}

}  // namespace gbdase
