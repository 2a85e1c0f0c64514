#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tbm/matrix.hpp"

namespace tbm {

/// Leading-r left singular subspace of a matrix.
struct SingularSubspace {
    DenseMatrix basis;                   // p x r, orthonormal columns
    std::vector<double> singular_values;  // nonincreasing, >= 0
    std::size_t iterations = 0;
    bool converged = false;
};

struct SubspaceIterationOptions {
    std::size_t max_iters = 500;
    /// Stop once successive projectors differ by less than this (Frobenius).
    double tol = 1e-10;
    std::uint64_t seed = 0x5eedULL;
    /// Standard deviation of the Gaussian perturbation added to the identity start.
    double start_perturbation = 0.1;
};

/// Truncated SVD by block power iteration on a*a^T with QR re-orthonormalization
/// each step and a final Rayleigh-Ritz rotation. Right singular vectors are not
/// formed. Each basis column is signed so its largest-magnitude entry is positive.
SingularSubspace svd_r(const DenseMatrix& a, std::size_t r, const SubspaceIterationOptions& opts = {});

/// Same as svd_r but starting from a precomputed Gram matrix a*a^T.
SingularSubspace leading_eigenspace(const DenseMatrix& gram, std::size_t r,
                                    const SubspaceIterationOptions& opts = {});

/// Thin Q factor of a Householder QR (n >= k). Columns are orthonormal even
/// when the input is rank deficient.
DenseMatrix householder_q(const DenseMatrix& a);

struct SymmetricEigen {
    std::vector<double> values;  // descending
    DenseMatrix vectors;         // columns match values
};

/// Cyclic Jacobi eigensolver for small symmetric matrices.
SymmetricEigen symmetric_eigen(const DenseMatrix& s);

}  // namespace tbm
