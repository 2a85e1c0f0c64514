#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>

#include "support/oracles.hpp"
#include "tbm/clustering.hpp"
#include "tbm/error.hpp"
#include "tbm/features.hpp"
#include "tbm/synthetic.hpp"

using namespace tbm;

namespace {

PlantedSpec small_spec(std::uint64_t seed) {
    PlantedSpec s;
    s.n_subjects = 10;
    s.p = 24;
    s.r_true = 3;
    s.noise_sigma = 0.1;
    s.seed = seed;
    return s;
}

// Brute-force residual: sum of squared deviations from block means.
double residual_oracle(const DenseTensor& y, const Membership& z) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.dim(0); ++i)
        for (std::size_t k = 0; k < y.dim(1); ++k)
            for (std::size_t u = 0; u < y.dim(2); ++u)
                for (std::size_t v = 0; v < y.dim(3); ++v) {
                    const double d = y(i, k, u, v) - oracle::block_mean(y, z, i, k, z[u], z[v]);
                    s += d * d;
                }
    return s;
}

}  // namespace

TEST(KMeans, SeedingPicksDistinctPoints) {
    Rng rng(21);
    const auto pts = oracle::random_matrix(30, 3, rng);
    const auto seeds = kmeanspp_seed(pts, 5, 7);
    EXPECT_EQ(std::set<std::size_t>(seeds.begin(), seeds.end()).size(), 5u);
    EXPECT_EQ(seeds, kmeanspp_seed(pts, 5, 7));
}

TEST(KMeans, SeedingHandlesDuplicatePoints) {
    DenseMatrix pts(6, 1, 2.0);
    const auto seeds = kmeanspp_seed(pts, 3, 1);
    EXPECT_EQ(std::set<std::size_t>(seeds.begin(), seeds.end()).size(), 3u);
}

TEST(KMeans, SeparatedBlobsRecovered) {
    Rng rng(22);
    DenseMatrix pts(60, 2);
    std::vector<int> truth(60);
    for (std::size_t i = 0; i < 60; ++i) {
        const int c = static_cast<int>(i % 3);
        truth[i] = c + 1;
        pts(i, 0) = 10.0 * c + 0.1 * rng.normal();
        pts(i, 1) = -5.0 * c + 0.1 * rng.normal();
    }
    const auto res = kmeans(pts, 3, 5);
    EXPECT_EQ(oracle::misclustering(res.membership, Membership::from_one_based(truth, 3)), 0.0);
    for (std::size_t t = 1; t < res.inertia_trace.size(); ++t) {
        EXPECT_LE(res.inertia_trace[t], res.inertia_trace[t - 1] + 1e-12);
    }
}

TEST(KMeans, DistinctPointsAreAFixedPointAfterOneIteration) {
    const auto pts = DenseMatrix::from_rows({{0.0}, {1.0}, {2.0}});
    const auto res = kmeans(pts, 3, 1);
    EXPECT_EQ(res.iterations, 1u);
    EXPECT_TRUE(res.membership.all_nonempty());
}

TEST(KMeans, RejectsTooManyClusters) {
    const DenseMatrix pts(2, 2);
    EXPECT_THROW(kmeans(pts, 3, 0), ArgumentError);
}

TEST(BlockResidual, MatchesBruteForce) {
    const auto data = generate(small_spec(3));
    Rng rng(23);
    std::vector<std::uint32_t> labels(24);
    for (std::size_t j = 0; j < 24; ++j) labels[j] = static_cast<std::uint32_t>(j % 4);
    rng.shuffle(std::span<std::uint32_t>(labels));
    const Membership z(labels, 4);
    EXPECT_NEAR(block_residual(data.y, z), residual_oracle(data.y, z), 1e-9);
    EXPECT_NEAR(block_residual(data.y, data.truth), residual_oracle(data.y, data.truth), 1e-9);
}

TEST(BlockResidual, ZeroForNoiselessPlant) {
    auto spec = small_spec(4);
    spec.noise_sigma = 0.0;
    const auto data = generate(spec);
    EXPECT_NEAR(block_residual(data.y, data.truth), 0.0, 1e-18);
}

TEST(Phsc, RecoversNoiselessPlant) {
    auto spec = small_spec(5);
    spec.noise_sigma = 0.0;
    const auto data = generate(spec);
    EXPECT_EQ(misclustering_rate(phsc_init(data.y, 3, 1), data.truth), 0.0);
}

TEST(HLloyd, FixedPointAtTruthAndCoreIsBlockMeans) {
    const auto data = generate(small_spec(6));
    HLloydConfig cfg;
    cfg.r = 3;
    const auto res = hlloyd_refine(data.y, data.truth, cfg);
    EXPECT_EQ(res.membership, data.truth);
    EXPECT_TRUE(res.converged);
    EXPECT_EQ(res.residual_trace.size(), res.iterations + 1);
    const auto means = block_means(data.y, res.membership);
    EXPECT_EQ(res.core, means);
}

TEST(HLloyd, RepairsCorruptedStartAndResidualNeverRises) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto data = generate(small_spec(seed));
        std::vector<std::uint32_t> labels(data.truth.labels().begin(), data.truth.labels().end());
        for (std::size_t j = 0; j < 4; ++j) labels[j] = (labels[j] + 1) % 3;
        HLloydConfig cfg;
        cfg.r = 3;
        const auto res = hlloyd_refine(data.y, Membership(labels, 3), cfg);
        EXPECT_EQ(misclustering_rate(res.membership, data.truth), 0.0) << "seed " << seed;
        ASSERT_FALSE(res.residual_trace.empty());
        EXPECT_NEAR(res.residual_trace.front(), block_residual(data.y, Membership(labels, 3)), 1e-9);
        for (std::size_t t = 1; t < res.residual_trace.size(); ++t) {
            EXPECT_LE(res.residual_trace[t], res.residual_trace[t - 1]) << "seed " << seed << " step " << t;
        }
    }
}

TEST(HLloyd, KeepsEveryClusterNonempty) {
    const auto data = generate(small_spec(7));
    std::vector<std::uint32_t> labels(24, 0);
    labels[0] = 1;
    labels[1] = 2;
    HLloydConfig cfg;
    cfg.r = 3;
    EXPECT_TRUE(hlloyd_refine(data.y, Membership(labels, 3), cfg).membership.all_nonempty());
}

TEST(HLloyd, ValidatesInput) {
    const auto data = generate(small_spec(8));
    HLloydConfig cfg;
    cfg.r = 4;
    EXPECT_THROW(hlloyd_refine(data.y, data.truth, cfg), ArgumentError);
    cfg.r = 3;
    cfg.max_iters = 0;
    EXPECT_THROW(hlloyd_refine(data.y, data.truth, cfg), ArgumentError);
}

TEST(Bic, FormulaByHand) {
    const auto data = generate(small_spec(9));
    const double n = static_cast<double>(data.y.size());
    const double rss = block_residual(data.y, data.truth);
    const double expect = n * std::log(rss / n) + 10.0 * 2.0 * 9.0 * std::log(n) + 24.0 * std::log(3.0);
    EXPECT_NEAR(bic_score(data.y, data.truth), expect, 1e-8 * std::abs(expect));
}

TEST(Bic, ZeroResidualIsMinusInfinity) {
    auto spec = small_spec(10);
    spec.noise_sigma = 0.0;
    const auto data = generate(spec);
    EXPECT_EQ(bic_score(data.y, data.truth), -std::numeric_limits<double>::infinity());
}

TEST(SelectR, PicksPlantedRankAndKeepsRequestedOrder) {
    const auto data = generate(small_spec(11));
    const std::vector<std::size_t> rs = {5, 2, 3, 4};
    const auto sel = select_r(data.y, rs, 3);
    EXPECT_EQ(sel.best_r, 3u);
    ASSERT_EQ(sel.table.size(), 4u);
    for (std::size_t k = 0; k < rs.size(); ++k) EXPECT_EQ(sel.table[k].r, rs[k]);
}

TEST(SelectR, SingletonRangeGivesOneRow) {
    const auto data = generate(small_spec(12));
    const std::vector<std::size_t> rs = {3};
    const auto sel = select_r(data.y, rs, 1);
    EXPECT_EQ(sel.table.size(), 1u);
    EXPECT_EQ(sel.best_r, 3u);
}

TEST(SelectR, IndependentOfWorkerCount) {
    const auto data = generate(small_spec(13));
    const std::vector<std::size_t> rs = {2, 3, 4, 5};
    SelectOptions one, four;
    four.workers = 4;
    const auto a = select_r(data.y, rs, 9, one);
    const auto b = select_r(data.y, rs, 9, four);
    ASSERT_EQ(a.table.size(), b.table.size());
    for (std::size_t k = 0; k < a.table.size(); ++k) {
        EXPECT_EQ(a.table[k].bic, b.table[k].bic);
        EXPECT_EQ(a.table[k].membership, b.table[k].membership);
    }
}

TEST(SelectR, RejectsOutOfRange) {
    const auto data = generate(small_spec(14));
    const std::vector<std::size_t> too_big = {25};
    EXPECT_THROW(select_r(data.y, too_big, 0), ArgumentError);
    EXPECT_THROW(select_r(data.y, std::span<const std::size_t>{}, 0), ArgumentError);
}
