#include "tbm/membership.hpp"

#include <algorithm>
#include <string>

#include "tbm/error.hpp"

namespace tbm {

Membership::Membership(std::vector<std::uint32_t> labels, std::size_t r) : labels_(std::move(labels)), r_(r) {
    if (r_ == 0) throw ArgumentError("Membership: cluster count must be positive");
    for (std::size_t j = 0; j < labels_.size(); ++j) {
        if (labels_[j] >= r_) {
            throw ArgumentError("Membership: label " + std::to_string(labels_[j] + 1) + " of item " +
                                std::to_string(j + 1) + " exceeds cluster count " + std::to_string(r_));
        }
    }
}

Membership Membership::from_one_based(const std::vector<int>& labels, std::size_t r) {
    std::vector<std::uint32_t> z(labels.size());
    for (std::size_t j = 0; j < labels.size(); ++j) {
        if (labels[j] < 1) throw ArgumentError("Membership: cluster ids are one-based");
        z[j] = static_cast<std::uint32_t>(labels[j] - 1);
    }
    return Membership(std::move(z), r);
}

Membership Membership::single(std::size_t p) { return Membership(std::vector<std::uint32_t>(p, 0), 1); }

std::vector<std::size_t> Membership::cluster_sizes() const {
    std::vector<std::size_t> sizes(r_, 0);
    for (auto l : labels_) ++sizes[l];
    return sizes;
}

bool Membership::all_nonempty() const {
    auto sizes = cluster_sizes();
    return std::ranges::none_of(sizes, [](std::size_t s) { return s == 0; });
}

DenseMatrix Membership::indicator() const {
    DenseMatrix m(labels_.size(), r_);
    for (std::size_t j = 0; j < labels_.size(); ++j) m(j, labels_[j]) = 1.0;
    return m;
}

Membership Membership::relabeled(std::span<const std::uint32_t> perm) const {
    if (perm.size() != r_) throw ArgumentError("Membership::relabeled: permutation length differs from r");
    std::vector<std::uint32_t> z(labels_.size());
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = perm[labels_[j]];
    return Membership(std::move(z), r_);
}

CoreTensor::CoreTensor(DenseTensor values) : values_(std::move(values)) {
    if (values_.order() != 4 || values_.dim(2) != values_.dim(3)) {
        throw ArgumentError("CoreTensor: expected dims (subjects, modalities, r, r)");
    }
}

DenseMatrix CoreTensor::slice(std::size_t subject, std::size_t modality) const {
    const std::size_t rr = r();
    DenseMatrix out(rr, rr);
    for (std::size_t b = 0; b < rr; ++b)
        for (std::size_t a = 0; a < rr; ++a) out(a, b) = values_(subject, modality, a, b);
    return out;
}

void require_connectome_shape(const DenseTensor& y, const char* op) {
    if (y.order() != 4) throw ArgumentError(std::string(op) + ": connectome tensor must have order 4");
    if (y.dim(2) != y.dim(3)) {
        throw ArgumentError(std::string(op) + ": modes 3 and 4 must share the ROI dimension");
    }
}

}  // namespace tbm
