#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tbm/matrix.hpp"
#include "tbm/tensor.hpp"

namespace tbm {

/// Cluster assignment of p items into r clusters. Labels are zero-based in
/// memory (0..r-1); files and reports use one-based cluster ids.
class Membership {
public:
    Membership() = default;
    Membership(std::vector<std::uint32_t> labels, std::size_t r);

    /// Convenience for tests: labels given one-based as in the file format.
    static Membership from_one_based(const std::vector<int>& labels, std::size_t r);
    /// All items in one cluster.
    static Membership single(std::size_t p);

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t r() const noexcept { return r_; }
    std::uint32_t operator[](std::size_t j) const { return labels_[j]; }
    std::span<const std::uint32_t> labels() const noexcept { return labels_; }

    std::vector<std::size_t> cluster_sizes() const;
    bool all_nonempty() const;

    /// Binary p x r indicator matrix M with M(j, z_j) = 1.
    DenseMatrix indicator() const;

    /// New label of item j is perm[old label].
    Membership relabeled(std::span<const std::uint32_t> perm) const;

    bool operator==(const Membership&) const = default;

private:
    std::vector<std::uint32_t> labels_;
    std::size_t r_ = 0;
};

/// Per-subject, per-modality r x r block means; dims (subjects, modalities, r, r).
class CoreTensor {
public:
    CoreTensor() = default;
    explicit CoreTensor(DenseTensor values);

    const DenseTensor& values() const noexcept { return values_; }
    std::size_t n_subjects() const { return values_.dim(0); }
    std::size_t n_modalities() const { return values_.dim(1); }
    std::size_t r() const { return values_.dim(2); }

    double operator()(std::size_t subject, std::size_t modality, std::size_t a, std::size_t b) const {
        return values_(subject, modality, a, b);
    }
    DenseMatrix slice(std::size_t subject, std::size_t modality) const;

    bool operator==(const CoreTensor&) const = default;

private:
    DenseTensor values_;
};

/// Validates the (subjects, modalities, ROI, ROI) shape; throws ArgumentError.
void require_connectome_shape(const DenseTensor& y, const char* op);

}  // namespace tbm
