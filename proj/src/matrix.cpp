#include "tbm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tbm/error.hpp"

namespace tbm {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ArgumentError("DenseMatrix: data length " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    const std::size_t m = n == 0 ? 0 : rows.front().size();
    DenseMatrix out(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != m) throw ArgumentError("DenseMatrix::from_rows: ragged rows");
        for (std::size_t j = 0; j < m; ++j) out(i, j) = rows[i][j];
    }
    return out;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
    return out;
}

std::vector<double> DenseMatrix::row(std::size_t i) const {
    std::vector<double> out(cols_);
    for (std::size_t j = 0; j < cols_; ++j) out[j] = (*this)(i, j);
    return out;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix out(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
        for (std::size_t i = 0; i < rows_; ++i) out(j, i) = (*this)(i, j);
    return out;
}

double DenseMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ArgumentError("multiply: inner dimensions " + std::to_string(a.cols()) + " and " +
                            std::to_string(b.rows()) + " differ");
    }
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        auto oc = out.col(j);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double bkj = b(k, j);
            if (bkj == 0.0) continue;
            auto ac = a.col(k);
            for (std::size_t i = 0; i < a.rows(); ++i) oc[i] += ac[i] * bkj;
        }
    }
    return out;
}

DenseMatrix multiply_at_b(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) throw ArgumentError("multiply_at_b: row counts differ");
    DenseMatrix out(a.cols(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        auto bc = b.col(j);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            auto ac = a.col(i);
            double s = 0.0;
            for (std::size_t k = 0; k < a.rows(); ++k) s += ac[k] * bc[k];
            out(i, j) = s;
        }
    }
    return out;
}

DenseMatrix gram_rows(const DenseMatrix& a) {
    const std::size_t n = a.rows();
    DenseMatrix g(n, n);
    // Accumulate column outer products; only the lower triangle is touched.
    for (std::size_t k = 0; k < a.cols(); ++k) {
        auto c = a.col(k);
        for (std::size_t j = 0; j < n; ++j) {
            const double cj = c[j];
            if (cj == 0.0) continue;
            auto gc = g.col(j);
            for (std::size_t i = j; i < n; ++i) gc[i] += c[i] * cj;
        }
    }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j + 1; i < n; ++i) g(j, i) = g(i, j);
    return g;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ArgumentError("subtract: shape mismatch");
    DenseMatrix out = a;
    auto od = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < od.size(); ++i) od[i] -= bd[i];
    return out;
}

DenseMatrix select_rows(const DenseMatrix& a, std::span<const std::size_t> rows) {
    DenseMatrix out(rows.size(), a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < rows.size(); ++i) out(i, j) = a(rows[i], j);
    return out;
}

DenseMatrix select_cols(const DenseMatrix& a, std::span<const std::size_t> cols) {
    DenseMatrix out(a.rows(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) std::ranges::copy(a.col(cols[j]), out.col(j).begin());
    return out;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ArgumentError("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

}  // namespace tbm
