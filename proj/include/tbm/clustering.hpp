#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tbm/linalg.hpp"
#include "tbm/matrix.hpp"
#include "tbm/membership.hpp"
#include "tbm/tensor.hpp"

namespace tbm {

// --- k-means ---------------------------------------------------------------

/// k-means++ seeding over the rows of `points`. Returns k distinct row indices:
/// the first uniform, each later one drawn with probability proportional to
/// the squared distance to its nearest chosen seed. When every remaining
/// point coincides with a seed, the next index is uniform over the unchosen.
std::vector<std::size_t> kmeanspp_seed(const DenseMatrix& points, std::size_t k, std::uint64_t seed);

struct KMeansResult {
    Membership membership;
    DenseMatrix centroids;               // k x d
    std::vector<double> inertia_trace;  // one entry per Lloyd iteration
    std::size_t iterations = 0;
};

/// Lloyd iteration from a k-means++ start. Ties go to the smallest cluster id;
/// an emptied cluster is re-seeded with the point of largest current cost.
KMeansResult kmeans(const DenseMatrix& points, std::size_t k, std::uint64_t seed, std::size_t max_iters = 100);

// --- tensor block model clustering -----------------------------------------

struct SpectralInitOptions {
    SubspaceIterationOptions svd{};
    std::size_t kmeans_max_iters = 100;
};

/// Partial high-order spectral clustering of the ROI axis of a
/// (subjects, modalities, ROI, ROI) tensor:
///   U1 = SVD_r(M3(y)),  U2 = SVD_r(M3(y x4 U1^T)),
///   Y3 = U2 U2^T M3(y x4 U2^T),
/// then k-means++/Lloyd on the p ROI rows of Y3.
Membership phsc_init(const DenseTensor& y, std::size_t r, std::uint64_t seed, const SpectralInitOptions& opts = {});

struct HLloydConfig {
    std::size_t r = 0;
    std::size_t max_iters = 50;
    /// When positive, also stop once the relative residual decrease drops to tol.
    double tol = 0.0;
};

struct HLloydResult {
    Membership membership;
    CoreTensor core;
    /// Blockwise residual of the initial labels, then after each label update.
    std::vector<double> residual_trace;
    std::size_t iterations = 0;
    bool converged = false;
};

/// High-order Lloyd refinement with a single membership shared by both ROI modes.
HLloydResult hlloyd_refine(const DenseTensor& y, const Membership& z0, const HLloydConfig& cfg);

/// ||y - S(z) x3 M x4 M||_F^2 with S(z) the block means.
double block_residual(const DenseTensor& y, const Membership& z);

/// N ln(RSS/N) + (subjects * modalities * r^2) ln N + p ln r; lower is better.
/// A zero residual scores -infinity.
double bic_score(const DenseTensor& y, const Membership& z);

struct BicRow {
    std::size_t r = 0;
    double bic = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;
    Membership membership;
};

struct ModelSelection {
    std::size_t best_r = 0;
    std::vector<BicRow> table;  // in the order of the requested r values
};

struct SelectOptions {
    std::size_t hlloyd_max_iters = 50;
    double hlloyd_tol = 0.0;
    SpectralInitOptions spectral{};
    /// 0 picks the hardware concurrency.
    std::size_t workers = 1;
};

/// Runs phsc_init + hlloyd_refine for each r and picks the BIC argmin,
/// breaking ties toward the smaller r.
ModelSelection select_r(const DenseTensor& y, std::span<const std::size_t> r_values, std::uint64_t seed,
                        const SelectOptions& opts = {});

}  // namespace tbm
