#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <tuple>

#include "tbm/error.hpp"
#include "tbm/evaluation.hpp"
#include "tbm/parallel.hpp"
#include "tbm/random.hpp"

namespace tbm {
namespace {

struct ClassCounts {
    std::size_t pos = 0;
    std::size_t neg = 0;
};

ClassCounts count_classes(std::span<const int> labels, std::span<const std::size_t> rows) {
    ClassCounts c;
    for (auto i : rows) (labels[i] == 1 ? c.pos : c.neg) += 1;
    return c;
}

std::string describe(const ClassCounts& c) {
    return std::to_string(c.pos) + " positives, " + std::to_string(c.neg) + " negatives";
}

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

std::vector<Split> splits_from(const std::vector<std::size_t>& fold_of, std::size_t k,
                               std::span<const std::size_t> rows) {
    std::vector<Split> out(k);
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t f = 0; f < k; ++f) (fold_of[t] == f ? out[f].test : out[f].train).push_back(rows[t]);
    }
    return out;
}

std::vector<int> labels_of(std::span<const int> labels, std::span<const std::size_t> rows) {
    std::vector<int> out(rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t) out[t] = labels[rows[t]];
    return out;
}

// Grid points sharing everything but n_trees are fit once at the largest size.
struct GridGroup {
    GbdtHyperparams largest;
    std::vector<std::size_t> members;
};

std::vector<GridGroup> group_grid(std::span<const GbdtHyperparams> grid) {
    std::vector<GridGroup> groups;
    std::map<std::tuple<std::size_t, double, double, std::size_t, std::uint64_t>, std::size_t> index;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto& hp = grid[g];
        const auto key = std::make_tuple(hp.max_depth, hp.learning_rate, hp.subsample, hp.min_samples_leaf, hp.seed);
        auto [it, inserted] = index.try_emplace(key, groups.size());
        if (inserted) groups.push_back({hp, {}});
        auto& group = groups[it->second];
        group.members.push_back(g);
        group.largest.n_trees = std::max(group.largest.n_trees, hp.n_trees);
    }
    return groups;
}

bool smaller_model(const GbdtHyperparams& a, const GbdtHyperparams& b) {
    if (a.n_trees != b.n_trees) return a.n_trees < b.n_trees;
    return a.max_depth < b.max_depth;
}

struct OuterJobResult {
    std::size_t chosen = 0;
    std::vector<double> test_probabilities;
};

}  // namespace

void CvProtocol::validate() const {
    if (outer_folds < 2) throw ArgumentError("CvProtocol: outer_folds must be at least 2");
    if (inner_folds < 2) throw ArgumentError("CvProtocol: inner_folds must be at least 2");
    if (n_repeats == 0) throw ArgumentError("CvProtocol: n_repeats must be positive");
}

std::vector<std::size_t> make_folds(std::span<const int> labels, std::size_t k, bool stratified, std::uint64_t seed) {
    if (k < 2 || k > labels.size()) {
        throw ArgumentError("make_folds: " + std::to_string(k) + " folds for " + std::to_string(labels.size()) + " rows");
    }
    Rng rng(seed);
    std::vector<std::size_t> fold(labels.size(), 0);
    std::size_t offset = 0;
    auto deal = [&](std::vector<std::size_t> rows) {
        rng.shuffle(rows);
        for (std::size_t t = 0; t < rows.size(); ++t) fold[rows[t]] = (offset + t) % k;
        offset += rows.size();
    };
    if (stratified) {
        for (int cls : {1, 0}) {
            std::vector<std::size_t> rows;
            for (std::size_t i = 0; i < labels.size(); ++i)
                if (labels[i] == cls) rows.push_back(i);
            deal(std::move(rows));
        }
    } else {
        std::vector<std::size_t> rows(labels.size());
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        deal(std::move(rows));
    }
    return fold;
}

std::vector<GbdtHyperparams> default_grid(std::uint64_t seed) {
    std::vector<GbdtHyperparams> grid;
    for (std::size_t trees : {100, 300})
        for (std::size_t depth : {2, 3, 4})
            for (double lr : {0.05, 0.1})
                for (double sub : {0.8, 1.0}) grid.push_back({trees, depth, lr, sub, 1, seed});
    return grid;
}

NestedCvResult nested_cv(const FeatureTable& table, std::span<const GbdtHyperparams> grid, const CvProtocol& proto,
                         const NestedCvOptions& opts) {
    proto.validate();
    if (grid.empty()) throw ArgumentError("nested_cv: empty hyperparameter grid");
    for (const auto& hp : grid) hp.validate();

    const auto& labels = table.labels();
    const DenseMatrix& x = table.values();
    const std::size_t n = table.n_rows();
    const auto groups = group_grid(grid);

    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;

    // Outer splits are built and checked up front so a bad protocol fails
    // before any model is trained.
    std::vector<std::vector<Split>> outer(proto.n_repeats);
    for (std::size_t rep = 0; rep < proto.n_repeats; ++rep) {
        const auto fold_of = make_folds(labels, proto.outer_folds, proto.stratified, derive_seed(proto.seed, {rep}));
        outer[rep] = splits_from(fold_of, proto.outer_folds, all);
        std::size_t scorable = 0;
        for (std::size_t f = 0; f < proto.outer_folds; ++f) {
            const auto test = count_classes(labels, outer[rep][f].test);
            const auto train = count_classes(labels, outer[rep][f].train);
            if (train.pos == 0 || train.neg == 0 || test.pos + test.neg == 0) {
                throw ProtocolError("nested_cv: repeat " + std::to_string(rep + 1) + ", outer fold " +
                                    std::to_string(f + 1) + " is degenerate (test: " + describe(test) +
                                    "; train: " + describe(train) + ")");
            }
            scorable += test.pos > 0 && test.neg > 0;
        }
        if (scorable == 0) {
            throw ProtocolError("nested_cv: repeat " + std::to_string(rep + 1) +
                                " has no outer test fold containing both classes");
        }
    }

    std::vector<OuterJobResult> jobs(proto.n_repeats * proto.outer_folds);
    parallel_for(jobs.size(), opts.workers, [&](std::size_t job) {
        const std::size_t rep = job / proto.outer_folds;
        const std::size_t f = job % proto.outer_folds;
        const Split& split = outer[rep][f];

        const auto train_labels = labels_of(labels, split.train);
        const auto inner_fold_of = make_folds(train_labels, proto.inner_folds, proto.stratified,
                                              derive_seed(proto.seed, {rep, f, 0x1EEull}));
        const auto inner = splits_from(inner_fold_of, proto.inner_folds, split.train);

        std::vector<double> accuracy_sum(grid.size(), 0.0);
        for (std::size_t v = 0; v < proto.inner_folds; ++v) {
            const auto& sub = inner[v];
            const auto sub_counts = count_classes(labels, sub.train);
            if (sub_counts.pos == 0 || sub_counts.neg == 0 || sub.test.empty()) {
                throw ProtocolError("nested_cv: repeat " + std::to_string(rep + 1) + ", outer fold " +
                                    std::to_string(f + 1) + ", inner fold " + std::to_string(v + 1) +
                                    " is degenerate (train: " + describe(sub_counts) + ")");
            }
            const DenseMatrix sub_x = select_rows(x, sub.train);
            const auto sub_y = labels_of(labels, sub.train);
            const DenseMatrix val_x = select_rows(x, sub.test);
            const auto val_y = labels_of(labels, sub.test);
            for (const auto& group : groups) {
                GbdtHyperparams hp = group.largest;
                hp.seed = derive_seed(hp.seed, {rep, f, v});
                const GbdtModel model = fit(sub_x, sub_y, hp);
                for (auto g : group.members) {
                    if (opts.observer) opts.observer({rep, f, static_cast<int>(v), g, sub.train, sub.test});
                    accuracy_sum[g] += accuracy(val_y, predict_proba(model, val_x, grid[g].n_trees));
                }
            }
        }

        std::size_t best = 0;
        for (std::size_t g = 1; g < grid.size(); ++g) {
            const double a = accuracy_sum[g] / static_cast<double>(proto.inner_folds);
            const double b = accuracy_sum[best] / static_cast<double>(proto.inner_folds);
            if (a > b || (a == b && smaller_model(grid[g], grid[best]))) best = g;
        }

        GbdtHyperparams hp = grid[best];
        hp.seed = derive_seed(hp.seed, {rep, f, proto.inner_folds});
        if (opts.observer) opts.observer({rep, f, -1, best, split.train, split.test});
        const GbdtModel model = fit(select_rows(x, split.train), train_labels, hp);
        jobs[job] = {best, predict_proba(model, select_rows(x, split.test))};
    });

    NestedCvResult result;
    std::vector<FoldMetrics> per_repeat;
    for (std::size_t rep = 0; rep < proto.n_repeats; ++rep) {
        RepeatResult rr;
        rr.out_of_fold.assign(n, 0.0);
        for (std::size_t f = 0; f < proto.outer_folds; ++f) {
            const auto& job = jobs[rep * proto.outer_folds + f];
            const auto& test = outer[rep][f].test;
            for (std::size_t t = 0; t < test.size(); ++t) rr.out_of_fold[test[t]] = job.test_probabilities[t];
            const auto test_labels = labels_of(labels, test);
            const auto c = count_classes(labels, test);
            if (c.pos > 0 && c.neg > 0) {
                rr.folds.push_back(score_all(test_labels, job.test_probabilities));
            } else {
                // Ranking metrics need both classes; such folds count toward accuracy only.
                const double nan = std::numeric_limits<double>::quiet_NaN();
                rr.folds.push_back({accuracy(test_labels, job.test_probabilities), nan, nan, nan});
            }
            rr.chosen.push_back(job.chosen);
        }
        std::size_t ranked = 0;
        for (const auto& fm : rr.folds) {
            rr.mean.accuracy += fm.accuracy;
            if (std::isnan(fm.auroc)) continue;
            ++ranked;
            rr.mean.auroc += fm.auroc;
            rr.mean.auprc += fm.auprc;
            rr.mean.min_re_p += fm.min_re_p;
        }
        rr.mean.accuracy /= static_cast<double>(rr.folds.size());
        rr.mean.auroc /= static_cast<double>(ranked);
        rr.mean.auprc /= static_cast<double>(ranked);
        rr.mean.min_re_p /= static_cast<double>(ranked);
        per_repeat.push_back(rr.mean);
        result.repeats.push_back(std::move(rr));
    }
    result.report = summarize(per_repeat);
    return result;
}

}  // namespace tbm
