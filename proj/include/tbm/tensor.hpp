#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "tbm/matrix.hpp"

namespace tbm {

/// Dense order-d tensor. The first index varies fastest, so the flat offset of
/// (j1, ..., jd) is j1 + p1*j2 + p1*p2*j3 + ...; this is the layout for which
/// mode-i matricization orders its columns by the remaining indices with the
/// lowest mode fastest. Modes are zero-based throughout the API.
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(std::vector<std::size_t> dims, double fill = 0.0);
    DenseTensor(std::vector<std::size_t> dims, std::vector<double> data);

    std::size_t order() const noexcept { return dims_.size(); }
    const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    std::size_t dim(std::size_t mode) const { return dims_.at(mode); }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    std::size_t offset(std::span<const std::size_t> index) const;

    template <class... I>
    double& operator()(I... index) {
        return data_[offset(std::array<std::size_t, sizeof...(I)>{static_cast<std::size_t>(index)...})];
    }
    template <class... I>
    double operator()(I... index) const {
        return data_[offset(std::array<std::size_t, sizeof...(I)>{static_cast<std::size_t>(index)...})];
    }

    double frobenius_norm() const;

    bool operator==(const DenseTensor&) const = default;

private:
    std::vector<std::size_t> dims_;
    std::vector<double> data_;
};

/// Mode-`mode` unfolding: rows indexed by that mode, columns by the remaining
/// indices composed first-fastest.
DenseMatrix matricize(const DenseTensor& t, std::size_t mode);

/// Inverse of matricize for a tensor of the given dims.
DenseTensor dematricize(const DenseMatrix& m, std::span<const std::size_t> dims, std::size_t mode);

/// t x_mode u: contracts mode `mode` of t with the columns of u.
DenseTensor mode_product(const DenseTensor& t, const DenseMatrix& u, std::size_t mode);

struct ModeFactor {
    DenseMatrix matrix;
    std::size_t mode;
};

/// s x_{m1} U1 x_{m2} U2 ... over distinct modes.
DenseTensor multilinear_product(const DenseTensor& s, std::span<const ModeFactor> factors);

double max_abs_diff(const DenseTensor& a, const DenseTensor& b);

}  // namespace tbm
