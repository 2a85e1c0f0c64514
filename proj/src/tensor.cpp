#include "tbm/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "tbm/error.hpp"

namespace tbm {
namespace {

std::size_t product(std::span<const std::size_t> dims, std::size_t begin, std::size_t end) {
    std::size_t p = 1;
    for (std::size_t k = begin; k < end; ++k) p *= dims[k];
    return p;
}

void check_dims(const std::vector<std::size_t>& dims) {
    if (dims.empty()) throw ArgumentError("DenseTensor: order must be at least 1");
    for (auto d : dims)
        if (d == 0) throw ArgumentError("DenseTensor: every dimension must be positive");
}

void check_mode(const DenseTensor& t, std::size_t mode, const char* op) {
    if (mode >= t.order()) {
        throw ArgumentError(std::string(op) + ": mode " + std::to_string(mode) + " out of range for order-" +
                            std::to_string(t.order()) + " tensor");
    }
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> dims, double fill) : dims_(std::move(dims)) {
    check_dims(dims_);
    data_.assign(product(dims_, 0, dims_.size()), fill);
}

DenseTensor::DenseTensor(std::vector<std::size_t> dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
    check_dims(dims_);
    if (product(dims_, 0, dims_.size()) != data_.size()) {
        throw ArgumentError("DenseTensor: data length " + std::to_string(data_.size()) +
                            " does not match the product of dims");
    }
}

std::size_t DenseTensor::offset(std::span<const std::size_t> index) const {
    std::size_t off = 0;
    std::size_t stride = 1;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        off += index[k] * stride;
        stride *= dims_[k];
    }
    return off;
}

double DenseTensor::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

DenseMatrix matricize(const DenseTensor& t, std::size_t mode) {
    check_mode(t, mode, "matricize");
    const auto& dims = t.dims();
    const std::size_t left = product(dims, 0, mode);
    const std::size_t pm = dims[mode];
    const std::size_t right = product(dims, mode + 1, dims.size());
    DenseMatrix out(pm, left * right);
    auto src = t.data();
    for (std::size_t jr = 0; jr < right; ++jr)
        for (std::size_t j = 0; j < pm; ++j)
            for (std::size_t jl = 0; jl < left; ++jl) out(j, jl + left * jr) = src[jl + left * (j + pm * jr)];
    return out;
}

DenseTensor dematricize(const DenseMatrix& m, std::span<const std::size_t> dims, std::size_t mode) {
    DenseTensor out(std::vector<std::size_t>(dims.begin(), dims.end()));
    check_mode(out, mode, "dematricize");
    const std::size_t left = product(dims, 0, mode);
    const std::size_t pm = dims[mode];
    const std::size_t right = product(dims, mode + 1, dims.size());
    if (m.rows() != pm || m.cols() != left * right) throw ArgumentError("dematricize: matrix shape does not match dims");
    auto dst = out.data();
    for (std::size_t jr = 0; jr < right; ++jr)
        for (std::size_t j = 0; j < pm; ++j)
            for (std::size_t jl = 0; jl < left; ++jl) dst[jl + left * (j + pm * jr)] = m(j, jl + left * jr);
    return out;
}

DenseTensor mode_product(const DenseTensor& t, const DenseMatrix& u, std::size_t mode) {
    check_mode(t, mode, "mode_product");
    const auto& dims = t.dims();
    if (u.cols() != dims[mode]) {
        throw ArgumentError("mode_product: matrix has " + std::to_string(u.cols()) + " columns but mode " +
                            std::to_string(mode) + " has dimension " + std::to_string(dims[mode]));
    }
    const std::size_t left = product(dims, 0, mode);
    const std::size_t pm = dims[mode];
    const std::size_t right = product(dims, mode + 1, dims.size());
    const std::size_t q = u.rows();

    std::vector<std::size_t> out_dims = dims;
    out_dims[mode] = q;
    DenseTensor out(std::move(out_dims));
    auto src = t.data();
    auto dst = out.data();
    for (std::size_t jr = 0; jr < right; ++jr) {
        for (std::size_t j = 0; j < pm; ++j) {
            const double* in = src.data() + left * (j + pm * jr);
            for (std::size_t k = 0; k < q; ++k) {
                const double w = u(k, j);
                if (w == 0.0) continue;
                double* o = dst.data() + left * (k + q * jr);
                for (std::size_t jl = 0; jl < left; ++jl) o[jl] += w * in[jl];
            }
        }
    }
    return out;
}

DenseTensor multilinear_product(const DenseTensor& s, std::span<const ModeFactor> factors) {
    std::vector<bool> seen(s.order(), false);
    for (const auto& f : factors) {
        check_mode(s, f.mode, "multilinear_product");
        if (seen[f.mode]) throw ArgumentError("multilinear_product: mode " + std::to_string(f.mode) + " repeated");
        seen[f.mode] = true;
        if (f.matrix.cols() != s.dim(f.mode)) {
            throw ArgumentError("multilinear_product: factor for mode " + std::to_string(f.mode) +
                                " is not conformable");
        }
    }
    DenseTensor out = s;
    for (const auto& f : factors) out = mode_product(out, f.matrix, f.mode);
    return out;
}

double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
    if (a.dims() != b.dims()) throw ArgumentError("max_abs_diff: tensor shapes differ");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

}  // namespace tbm
