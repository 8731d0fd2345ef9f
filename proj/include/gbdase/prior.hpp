#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "gbdase/banded.hpp"

namespace gbdase {

// Configuration of the r-th order random-walk prior on latent trajectories.
struct RwPriorSpec {
    int r = 1;            // random-walk order, 1 or 2
    double sigma0 = 1.0;  // initial-state standard deviation
    int d = 1;            // latent dimension
    int m = 2;            // time points

    void validate() const;
};

// r-th order finite difference operator as an (m - r) x m matrix: row k
// applies the r-th difference ending at position k + r.
Eigen::MatrixXd difference_matrix(int r, int m);

// K1 = D_r^T D_r (x) I_d with bandwidth r*d, and K2 = (1/sigma0^2)
// sum_s e_s e_s^T (x) I_d, diagonal with 1/sigma0^2 on the first r*d
// entries. Both of dimension m*d. vec convention: time-major blocks of
// size d, i.e. vec(x_{i,1:m}) = (x_i1^T, ..., x_im^T)^T.
std::pair<BandedMatrix, BandedMatrix> prior_precision_blocks(const RwPriorSpec& spec);

// Log density of the RW(r) prior over all node trajectories. X holds m
// matrices of shape n x d; sigma holds the n per-node transition standard
// deviations.
double log_prior_density(const std::vector<Eigen::MatrixXd>& X, const Eigen::VectorXd& sigma,
                         const RwPriorSpec& spec);

}  // namespace gbdase
