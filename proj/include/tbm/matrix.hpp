#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tbm {

/// Dense real matrix stored column-major: element (i, j) lives at
/// data[i + rows * j].
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    /// Builds from row-major nested lists; handy in tests and examples.
    static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);
    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i + rows_ * j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i + rows_ * j]; }

    std::span<double> col(std::size_t j) { return {data_.data() + rows_ * j, rows_}; }
    std::span<const double> col(std::size_t j) const { return {data_.data() + rows_ * j, rows_}; }

    std::vector<double> row(std::size_t i) const;

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }
    std::vector<double> release() && { return std::move(data_); }

    DenseMatrix transposed() const;
    double frobenius_norm() const;

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
/// a^T * b without forming the transpose.
DenseMatrix multiply_at_b(const DenseMatrix& a, const DenseMatrix& b);
/// a * a^T, exploiting symmetry.
DenseMatrix gram_rows(const DenseMatrix& a);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);

/// Rows selected by index, in the given order.
DenseMatrix select_rows(const DenseMatrix& a, std::span<const std::size_t> rows);
DenseMatrix select_cols(const DenseMatrix& a, std::span<const std::size_t> cols);

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace tbm
