#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "tbm/error.hpp"
#include "tbm/tensor.hpp"

using namespace tbm;

TEST(Tensor, FirstIndexVariesFastest) {
    DenseTensor t({2, 3, 4});
    for (std::size_t k = 0; k < t.size(); ++k) t.data()[k] = static_cast<double>(k);
    EXPECT_EQ(t(1, 0, 0), 1.0);
    EXPECT_EQ(t(0, 1, 0), 2.0);
    EXPECT_EQ(t(0, 0, 1), 6.0);
    EXPECT_EQ(t(1, 2, 3), 1 + 2 * 2 + 6 * 3);
}

TEST(Tensor, MatricizeMatchesDefinition) {
    Rng rng(1);
    const auto t = oracle::random_tensor({3, 4, 2, 5}, rng);
    for (std::size_t mode = 0; mode < 4; ++mode) {
        EXPECT_EQ(matricize(t, mode), oracle::matricize(t, mode)) << "mode " << mode;
    }
}

TEST(Tensor, DematricizeInvertsMatricize) {
    Rng rng(2);
    const auto t = oracle::random_tensor({2, 3, 4, 3}, rng);
    for (std::size_t mode = 0; mode < 4; ++mode) {
        EXPECT_EQ(dematricize(matricize(t, mode), t.dims(), mode), t);
    }
}

TEST(Tensor, ModeProductMatchesElementwiseSum) {
    Rng rng(3);
    const auto t = oracle::random_tensor({3, 2, 4, 4}, rng);
    for (std::size_t mode = 0; mode < 4; ++mode) {
        const auto u = oracle::random_matrix(5, t.dim(mode), rng);
        EXPECT_LT(max_abs_diff(mode_product(t, u, mode), oracle::mode_product(t, u, mode)), 1e-12);
    }
}

TEST(Tensor, ModeProductUnfoldingIdentity) {
    // (t x_k U)_(k) = U t_(k)
    Rng rng(4);
    const auto t = oracle::random_tensor({4, 3, 5}, rng);
    const auto u = oracle::random_matrix(2, 3, rng);
    EXPECT_LT(max_abs_diff(matricize(mode_product(t, u, 1), 1), multiply(u, matricize(t, 1))), 1e-12);
}

TEST(Tensor, ProductsOnDistinctModesCommute) {
    Rng rng(5);
    const auto t = oracle::random_tensor({3, 4, 5}, rng);
    const auto a = oracle::random_matrix(2, 3, rng);
    const auto b = oracle::random_matrix(6, 5, rng);
    EXPECT_LT(max_abs_diff(mode_product(mode_product(t, a, 0), b, 2), mode_product(mode_product(t, b, 2), a, 0)),
              1e-12);
}

TEST(Tensor, RepeatedModeComposes) {
    // t x_k A x_k B = t x_k (B A)
    Rng rng(6);
    const auto t = oracle::random_tensor({3, 4}, rng);
    const auto a = oracle::random_matrix(5, 4, rng);
    const auto b = oracle::random_matrix(2, 5, rng);
    EXPECT_LT(max_abs_diff(mode_product(mode_product(t, a, 1), b, 1), mode_product(t, multiply(b, a), 1)), 1e-12);
}

TEST(Tensor, MultilinearProductMatchesSequentialProducts) {
    Rng rng(7);
    const auto s = oracle::random_tensor({2, 2, 3, 3}, rng);
    const auto m = oracle::random_matrix(6, 3, rng);
    const std::vector<ModeFactor> factors = {{m, 2}, {m, 3}};
    const auto expect = oracle::mode_product(oracle::mode_product(s, m, 2), m, 3);
    EXPECT_LT(max_abs_diff(multilinear_product(s, factors), expect), 1e-12);
}

TEST(Tensor, MultilinearProductRejectsBadFactors) {
    const DenseTensor s({2, 3});
    const DenseMatrix ok(4, 3), wrong(4, 2);
    const std::vector<ModeFactor> repeated = {{ok, 1}, {ok, 1}};
    const std::vector<ModeFactor> nonconformable = {{wrong, 1}};
    const std::vector<ModeFactor> out_of_range = {{ok, 2}};
    EXPECT_THROW(multilinear_product(s, repeated), ArgumentError);
    EXPECT_THROW(multilinear_product(s, nonconformable), ArgumentError);
    EXPECT_THROW(multilinear_product(s, out_of_range), ArgumentError);
    EXPECT_THROW(mode_product(s, wrong, 1), ArgumentError);
}

TEST(Tensor, FrobeniusNormOfUnfoldingIsInvariant) {
    Rng rng(8);
    const auto t = oracle::random_tensor({3, 3, 2}, rng);
    for (std::size_t mode = 0; mode < 3; ++mode) {
        EXPECT_NEAR(matricize(t, mode).frobenius_norm(), t.frobenius_norm(), 1e-12);
    }
}
