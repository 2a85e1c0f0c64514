#pragma once

// Shared kernels over a (subjects, modalities, ROI, ROI) tensor. The first two
// modes are folded into a single "slice" index s = i1 + n * i2 so that for a
// fixed ROI pair the slice vector is contiguous.

#include <cstddef>
#include <vector>

#include "tbm/membership.hpp"
#include "tbm/tensor.hpp"

namespace tbm::detail {

struct BlockShape {
    std::size_t slices;  // subjects * modalities
    std::size_t p;       // ROIs
    std::size_t r;

    BlockShape(const DenseTensor& y, const Membership& z)
        : slices(y.dim(0) * y.dim(1)), p(y.dim(2)), r(z.r()) {}
};

/// Block means with the core layout (subjects, modalities, r, r). Blocks with
/// no entries (an empty cluster) are zero; `empty` reports whether any occurred.
DenseTensor block_means_tolerant(const DenseTensor& y, const Membership& z, bool* empty = nullptr);

/// Sum of squared deviations of each entry from its block mean.
double residual_for(const DenseTensor& y, const Membership& z, const DenseTensor& means);

}  // namespace tbm::detail
