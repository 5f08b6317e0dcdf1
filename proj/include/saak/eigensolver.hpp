// Dense symmetric eigendecomposition used for training the transform kernels.
//
// Householder reduction to tridiagonal form followed by implicit-shift QL,
// with the eigenvector accumulator kept row-major so the rotation loops run
// over contiguous memory (covariance matrices here reach ~3400x3400).

#pragma once

#include <span>
#include <vector>

namespace saak {

struct SymmetricEigen {
    int dim = 0;
    std::vector<double> values;   // non-increasing
    std::vector<double> vectors;  // row-major, row i is the eigenvector of values[i]

    std::span<const double> vector(int i) const {
        return {vectors.data() + static_cast<std::size_t>(i) * dim,
                static_cast<std::size_t>(dim)};
    }
};

// matrix: row-major dim x dim, must be symmetric within 1e-9 (relative to its
// largest entry). Postconditions: A v_i = values[i] v_i within tol * ||A||,
// eigenvector rows orthonormal, and each row's first component exceeding
// 1e-12 in magnitude is positive.
//
// Throws std::invalid_argument on a non-symmetric input and std::runtime_error
// if QL fails to converge within the iteration cap (the message carries the
// remaining off-diagonal residual).
SymmetricEigen symmetric_eigendecomposition(std::span<const double> matrix, int dim,
                                            double tol = 1e-12);

}  // namespace saak
