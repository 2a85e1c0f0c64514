#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "tbm/baselines.hpp"
#include "tbm/error.hpp"
#include "tbm/features.hpp"
#include "tbm/synthetic.hpp"

using namespace tbm;

namespace {

Covariates fake_covariates(std::size_t n) {
    Covariates c;
    for (std::size_t i = 0; i < n; ++i) {
        c.age.push_back(30.0 + static_cast<double>(i));
        c.gender.push_back(static_cast<double>(i % 2));
        c.race.push_back(static_cast<double>((i / 2) % 2));
        c.hiv.push_back(static_cast<double>(i % 3 == 0));
    }
    return c;
}

std::vector<int> alternating(std::size_t n) {
    std::vector<int> l(n);
    for (std::size_t i = 0; i < n; ++i) l[i] = static_cast<int>(i % 2);
    return l;
}

}  // namespace

TEST(Features, BlockMeansMatchBruteForce) {
    Rng rng(41);
    const auto y = oracle::random_tensor({3, 2, 9, 9}, rng);
    const auto z = Membership::from_one_based({1, 2, 3, 1, 2, 3, 3, 3, 1}, 3);
    const auto s = block_means(y, z);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 2; ++k)
            for (std::size_t a = 0; a < 3; ++a)
                for (std::size_t b = 0; b < 3; ++b) EXPECT_NEAR(s(i, k, a, b), oracle::block_mean(y, z, i, k, a, b), 1e-12);
}

TEST(Features, BlockMeansRejectEmptyCluster) {
    const DenseTensor y({1, 1, 3, 3});
    EXPECT_THROW(block_means(y, Membership::from_one_based({1, 1, 1}, 2)), ArgumentError);
}

TEST(Features, FlattenUpperOrderAndRoundTrip) {
    const auto m = DenseMatrix::from_rows({{1, 2, 3}, {2, 4, 5}, {3, 5, 6}});
    const auto flat = flatten_upper(m);
    EXPECT_EQ(flat, (std::vector<double>{1, 2, 3, 4, 5, 6}));
    EXPECT_EQ(unflatten_upper(flat), m);
    EXPECT_THROW(unflatten_upper(std::vector<double>{1, 2}), ArgumentError);
}

TEST(Features, SixClustersGiveFortySixColumns) {
    PlantedSpec spec;
    spec.n_subjects = 6;
    spec.p = 18;
    spec.r_true = 6;
    const auto d = generate(spec);
    const auto t = assemble_features(d.y, d.truth, fake_covariates(6), alternating(6));
    EXPECT_EQ(t.n_features(), 46u);
    EXPECT_EQ(t.names().front(), "fun(1,1)");
    EXPECT_EQ(t.names()[21], "str(1,1)");
    EXPECT_EQ(t.names()[42], "age");
    EXPECT_EQ(t.names().back(), "hiv");
    EXPECT_EQ(t.index_of("str(2,5)"), 21u + 6u + 3u);
}

TEST(Features, ValuesAreBlockMeansInOrder) {
    Rng rng(42);
    const auto y = oracle::random_tensor({4, 2, 6, 6}, rng);
    const auto z = Membership::from_one_based({1, 2, 1, 2, 2, 1}, 2);
    const auto t = assemble_features(y, z, fake_covariates(4), alternating(4));
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(t.value(i, t.index_of("fun(1,2)")), oracle::block_mean(y, z, i, 0, 0, 1), 1e-12);
        EXPECT_NEAR(t.value(i, t.index_of("str(2,2)")), oracle::block_mean(y, z, i, 1, 1, 1), 1e-12);
        EXPECT_EQ(t.value(i, t.index_of("age")), 30.0 + static_cast<double>(i));
    }
}

TEST(Features, RawBaselineCountForBrainnetome) {
    EXPECT_EQ(raw_feature_count(246), 60766u);
    Rng rng(43);
    const auto y = oracle::random_tensor({2, 2, 5, 5}, rng);
    const auto t = raw_features(y, fake_covariates(2), alternating(2));
    EXPECT_EQ(t.n_features(), raw_feature_count(5));
}

TEST(Features, CovariateEncoding) {
    EXPECT_EQ(encode_gender("male"), 1.0);
    EXPECT_EQ(encode_gender("F"), 0.0);
    EXPECT_EQ(encode_hiv("1"), 1.0);
    EXPECT_EQ(encode_hiv("negative"), 0.0);
    EXPECT_THROW(encode_gender("unknown"), DataError);
}

TEST(FeatureTable, ValidatesLabelsAndValues) {
    DenseMatrix v(2, 1);
    EXPECT_THROW(FeatureTable({"x"}, v, {0, 2}), DataError);
    EXPECT_THROW(FeatureTable({"x", "y"}, v, {0, 1}), DataError);
    v(0, 0) = std::nan("");
    EXPECT_THROW(FeatureTable({"x"}, v, {0, 1}), DataError);
}

TEST(FeatureTable, SelectAndDrop) {
    const FeatureTable t({"a", "b", "c"}, DenseMatrix::from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}), {0, 1, 0},
                         {"s1", "s2", "s3"});
    const std::vector<std::size_t> rows = {2, 0};
    const auto sel = t.select_rows(rows);
    EXPECT_EQ(sel.value(0, 1), 8.0);
    EXPECT_EQ(sel.subject_ids(), (std::vector<std::string>{"s3", "s1"}));
    const auto dropped = t.without_feature(1);
    EXPECT_EQ(dropped.names(), (std::vector<std::string>{"a", "c"}));
    EXPECT_EQ(dropped.value(1, 1), 6.0);
}
