#include <gtest/gtest.h>

#include <sstream>

#include "support/oracles.hpp"
#include "tbm/baselines.hpp"
#include "tbm/error.hpp"

using namespace tbm;

namespace {

Covariates zeros(std::size_t n) {
    Covariates c;
    c.age.assign(n, 40.0);
    c.gender.assign(n, 0.0);
    c.race.assign(n, 1.0);
    c.hiv.assign(n, 0.0);
    return c;
}

std::vector<int> alternating(std::size_t n) {
    std::vector<int> l(n);
    for (std::size_t i = 0; i < n; ++i) l[i] = static_cast<int>(i % 2);
    return l;
}

}  // namespace

TEST(Pca, MatchesJacobiSvdOfCentredData) {
    Rng rng(61);
    const auto x = oracle::random_matrix(12, 30, rng);
    const auto res = pca(x, 3);
    DenseMatrix xc = x;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double mean = 0;
        for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, j);
        mean /= 12.0;
        EXPECT_NEAR(res.column_means[j], mean, 1e-12);
        for (std::size_t i = 0; i < x.rows(); ++i) xc(i, j) -= mean;
    }
    const auto ref = oracle::jacobi_svd(xc);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_NEAR(res.explained_variance[k], ref.sigma[k] * ref.sigma[k] / 11.0, 1e-9);
    }
    // Scores are the centred data projected on the components.
    EXPECT_LT(max_abs_diff(res.scores, multiply(xc, res.components)), 1e-9);
    EXPECT_LT(max_abs_diff(multiply_at_b(res.components, res.components), DenseMatrix::identity(3)), 1e-10);
}

TEST(Pca, FeatureTableAppendsCovariates) {
    Rng rng(62);
    const auto y = oracle::random_tensor({8, 2, 5, 5}, rng);
    const auto t = pca_features(y, 4, zeros(8), alternating(8));
    EXPECT_EQ(t.n_features(), 8u);
    EXPECT_EQ(t.names()[0], "pc1");
    EXPECT_EQ(t.names()[4], "age");
    EXPECT_THROW(pca_features(y, 9, zeros(8), alternating(8)), ArgumentError);
}

TEST(Atlas, BrainnetomeLobesCoverAllRois) {
    const auto atlas = AtlasClusterMap::brainnetome_lobes();
    EXPECT_EQ(atlas.groups().size(), 246u);
    EXPECT_EQ(atlas.groups().r(), 7u);
    EXPECT_EQ(atlas.groups().cluster_sizes(), (std::vector<std::size_t>{68, 56, 38, 12, 14, 22, 36}));
    EXPECT_EQ(atlas.groups()[0], 0u);
    EXPECT_EQ(atlas.groups()[245], 6u);
}

TEST(Atlas, ReadWriteRoundTrip) {
    const AtlasClusterMap atlas(Membership::from_one_based({1, 2, 2, 3, 1}, 3), {"a", "b", "c"});
    std::stringstream ss;
    atlas.write(ss);
    const auto back = AtlasClusterMap::read(ss, 5);
    EXPECT_EQ(back.groups(), atlas.groups());
}

TEST(Atlas, ReadRejectsBadMaps) {
    std::stringstream missing("roi_index,cluster_id\n1,1\n2,2\n");
    EXPECT_THROW(AtlasClusterMap::read(missing, 3), DataError);
    std::stringstream duplicate("1,1\n1,2\n2,1\n");
    EXPECT_THROW(AtlasClusterMap::read(duplicate, 2), DataError);
    std::stringstream out_of_range("1,1\n2,1\n3,1\n");
    EXPECT_THROW(AtlasClusterMap::read(out_of_range, 2), DataError);
}

TEST(Atlas, EightGroupsGiveSeventySixColumns) {
    Rng rng(63);
    const auto y = oracle::random_tensor({4, 2, 16, 16}, rng);
    std::vector<int> ids;
    for (int j = 0; j < 16; ++j) ids.push_back(j / 2 + 1);
    const AtlasClusterMap atlas(Membership::from_one_based(ids, 8));
    const auto t = atlas_features(y, atlas, zeros(4), alternating(4));
    EXPECT_EQ(t.n_features(), 76u);
    EXPECT_NEAR(t.value(2, t.index_of("str(3,5)")), oracle::block_mean(y, atlas.groups(), 2, 1, 2, 4), 1e-12);
}

TEST(Raw, EntriesAppearOnceInUpperTriangleOrder) {
    Rng rng(64);
    const auto y = oracle::random_tensor({3, 2, 4, 4}, rng);
    const auto t = raw_features(y, zeros(3), alternating(3));
    EXPECT_EQ(t.n_features(), 2u * 10u + 4u);
    EXPECT_EQ(t.value(1, t.index_of("fun(2,3)")), y(1, 0, 1, 2));
    EXPECT_EQ(t.value(2, t.index_of("str(4,4)")), y(2, 1, 3, 3));
}
