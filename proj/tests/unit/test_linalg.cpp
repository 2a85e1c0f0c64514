#include <gtest/gtest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "tbm/error.hpp"
#include "tbm/linalg.hpp"

using namespace tbm;

namespace {

double orthonormality_error(const DenseMatrix& q) {
    const auto g = multiply_at_b(q, q);
    return max_abs_diff(g, DenseMatrix::identity(q.cols()));
}

// Matrix with prescribed, well separated singular values.
DenseMatrix with_spectrum(std::size_t rows, std::size_t cols, const std::vector<double>& sigma, Rng& rng) {
    const auto u = householder_q(oracle::random_matrix(rows, sigma.size(), rng));
    const auto v = householder_q(oracle::random_matrix(cols, sigma.size(), rng));
    DenseMatrix a(rows, cols);
    for (std::size_t k = 0; k < sigma.size(); ++k)
        for (std::size_t j = 0; j < cols; ++j)
            for (std::size_t i = 0; i < rows; ++i) a(i, j) += sigma[k] * u(i, k) * v(j, k);
    return a;
}

}  // namespace

TEST(Linalg, HouseholderQIsOrthonormalAndSpansInput) {
    Rng rng(11);
    const auto a = oracle::random_matrix(9, 4, rng);
    const auto q = householder_q(a);
    ASSERT_EQ(q.rows(), 9u);
    ASSERT_EQ(q.cols(), 4u);
    EXPECT_LT(orthonormality_error(q), 1e-13);
    // a lies in span(q): a - q q^T a = 0.
    EXPECT_LT(max_abs_diff(a, multiply(q, multiply_at_b(q, a))), 1e-12);
}

TEST(Linalg, HouseholderQHandlesRankDeficiency) {
    DenseMatrix a(5, 3);
    for (std::size_t i = 0; i < 5; ++i) {
        a(i, 0) = static_cast<double>(i + 1);
        a(i, 1) = 2.0 * static_cast<double>(i + 1);
    }
    EXPECT_LT(orthonormality_error(householder_q(a)), 1e-13);
}

TEST(Linalg, SymmetricEigenReconstructs) {
    Rng rng(12);
    const auto x = oracle::random_matrix(6, 6, rng);
    const auto s = gram_rows(x);
    const auto e = symmetric_eigen(s);
    for (std::size_t k = 1; k < e.values.size(); ++k) EXPECT_GE(e.values[k - 1], e.values[k]);
    DenseMatrix rebuilt(6, 6);
    for (std::size_t k = 0; k < 6; ++k)
        for (std::size_t j = 0; j < 6; ++j)
            for (std::size_t i = 0; i < 6; ++i) rebuilt(i, j) += e.values[k] * e.vectors(i, k) * e.vectors(j, k);
    EXPECT_LT(max_abs_diff(rebuilt, s), 1e-10);
}

TEST(Linalg, SvdMatchesJacobiOracle) {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = with_spectrum(12, 30, {10, 6, 3, 1, 0.5}, rng);
        const auto got = svd_r(a, 3);
        const auto ref = oracle::jacobi_svd(a);
        ASSERT_TRUE(got.converged);
        for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(got.singular_values[k], ref.sigma[k], 1e-9);
        DenseMatrix ref_u(12, 3);
        for (std::size_t k = 0; k < 3; ++k)
            for (std::size_t i = 0; i < 12; ++i) ref_u(i, k) = ref.u(i, k);
        EXPECT_LT(oracle::subspace_distance(got.basis, ref_u), 1e-8);
        EXPECT_LT(orthonormality_error(got.basis), 1e-12);
    }
}

TEST(Linalg, SvdSignConventionAndDeterminism) {
    Rng rng(14);
    const auto a = oracle::random_matrix(8, 20, rng);
    const auto first = svd_r(a, 4);
    const auto second = svd_r(a, 4);
    EXPECT_EQ(first.basis, second.basis);
    for (std::size_t k = 0; k < 4; ++k) {
        double peak = 0.0;
        for (std::size_t i = 0; i < 8; ++i)
            if (std::abs(first.basis(i, k)) > std::abs(peak)) peak = first.basis(i, k);
        EXPECT_GT(peak, 0.0);
    }
}

TEST(Linalg, SvdOfRankOneMatrix) {
    DenseMatrix a(4, 3);
    const double u[] = {1, 2, 0, -2}, v[] = {3, 0, 4};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 3; ++j) a(i, j) = u[i] * v[j];
    const auto s = svd_r(a, 1);
    EXPECT_NEAR(s.singular_values[0], 3.0 * 5.0, 1e-10);
    EXPECT_NEAR(std::abs(s.basis(1, 0)), 2.0 / 3.0, 1e-10);
}

TEST(Linalg, SvdRejectsBadRank) {
    const DenseMatrix a(3, 5);
    EXPECT_THROW(svd_r(a, 0), ArgumentError);
    EXPECT_THROW(svd_r(a, 4), ArgumentError);
}
