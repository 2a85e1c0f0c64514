// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "tbm/baselines.hpp"
#include "tbm/clustering.hpp"
#include "tbm/evaluation.hpp"
#include "tbm/features.hpp"
#include "tbm/io.hpp"
#include "tbm/pipeline.hpp"
#include "tbm/synthetic.hpp"
#include "tbm/tensor.hpp"

using namespace tbm;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

PlantedSpec planted(std::uint64_t seed) {
    PlantedSpec s;  // 20 subjects, 2 modalities, p = 40, r = 4, gap 1, sigma 0.1, symmetric
    s.seed = seed;
    return s;
}

constexpr std::size_t kSeeds = 20;

// --- tensor algebra --------------------------------------------------------

Outcome tensor_suite() {
    const auto t0 = Clock::now();
    Rng rng(2024);
    std::size_t ok = 0;
    double worst = 0.0;
    for (std::size_t trial = 0; trial < 100; ++trial) {
        const std::size_t order = 3 + rng.index(2);
        std::vector<std::size_t> dims(order);
        for (auto& d : dims) d = 1 + rng.index(5);
        const auto t = oracle::random_tensor(dims, rng);
        const std::size_t k = rng.index(order);
        const std::size_t l = (k + 1 + rng.index(order - 1)) % order;
        const auto a = oracle::random_matrix(1 + rng.index(5), dims[k], rng);
        const auto a2 = oracle::random_matrix(1 + rng.index(5), a.rows(), rng);
        const auto b = oracle::random_matrix(1 + rng.index(5), dims[l], rng);

        double err = 0.0;
        for (std::size_t mode = 0; mode < order; ++mode) {
            err = std::max(err, max_abs_diff(matricize(t, mode), oracle::matricize(t, mode)));
            err = std::max(err, max_abs_diff(dematricize(matricize(t, mode), dims, mode), t));
        }
        const auto tk = mode_product(t, a, k);
        err = std::max(err, max_abs_diff(tk, oracle::mode_product(t, a, k)));
        err = std::max(err, max_abs_diff(matricize(tk, k), multiply(a, matricize(t, k))));
        err = std::max(err, max_abs_diff(mode_product(tk, b, l), mode_product(mode_product(t, b, l), a, k)));
        err = std::max(err, max_abs_diff(mode_product(tk, a2, k), mode_product(t, multiply(a2, a), k)));
        const std::vector<ModeFactor> factors = {{a, k}, {b, l}};
        err = std::max(err, max_abs_diff(multilinear_product(t, factors),
                                          oracle::mode_product(oracle::mode_product(t, a, k), b, l)));
        worst = std::max(worst, err);
        ok += err <= 1e-10;
    }
    const double secs = seconds_since(t0);
    return {ok == 100 && secs < 10.0, std::to_string(ok) + "/100 instances within 1e-10 (worst " + fmt("%.2e", worst) +
                                          "), " + fmt("%.2f", secs) + " s"};
}

// --- clustering --------------------------------------------------------------

struct ClusterRun {
    double miscluster;
    bool monotone;
    std::size_t steps;
};

ClusterRun cluster_once(const DenseTensor& y, const Membership& truth, std::size_t r, std::uint64_t seed) {
    const auto z0 = phsc_init(y, r, seed);
    HLloydConfig cfg;
    cfg.r = r;
    const auto res = hlloyd_refine(y, z0, cfg);
    bool monotone = true;
    for (std::size_t t = 1; t < res.residual_trace.size(); ++t) {
        monotone = monotone && res.residual_trace[t] <= res.residual_trace[t - 1];
    }
    const double mis = r == truth.r() ? misclustering_rate(res.membership, truth) : 0.0;
    return {mis, monotone, res.residual_trace.size()};
}

Outcome planted_recovery() {
    const auto t0 = Clock::now();
    std::size_t exact = 0;
    std::string misses;
    for (std::size_t s = 0; s < kSeeds; ++s) {
        const auto d = generate(planted(s));
        const auto run = cluster_once(d.y, d.truth, 4, derive_seed(s, {7}));
        if (run.miscluster == 0.0) {
            ++exact;
        } else {
            misses += " seed" + std::to_string(s) + "=" + fmt("%.3f", run.miscluster);
        }
    }
    const double secs = seconds_since(t0);
    return {exact >= 19 && secs < 60.0,
            std::to_string(exact) + "/20 seeds exact, " + fmt("%.2f", secs) + " s" + (misses.empty() ? "" : ";" + misses)};
}

Outcome monotone_hlloyd() {
    std::size_t runs = 0, monotone = 0, transitions = 0;
    for (std::size_t s = 0; s < kSeeds; ++s) {
        const auto d = generate(planted(s));
        for (std::size_t r = 2; r <= 8; ++r) {
            // Plain spectral start plus a corrupted truth start, so refinement has work to do.
            const auto run = cluster_once(d.y, d.truth, r, derive_seed(s, {7}));
            ++runs;
            monotone += run.monotone;
            transitions += run.steps - 1;
        }
        std::vector<std::uint32_t> labels(d.truth.labels().begin(), d.truth.labels().end());
        Rng rng(derive_seed(s, {8}));
        for (std::size_t j = 0; j < labels.size() / 4; ++j) labels[rng.index(labels.size())] = rng.index(4);
        Membership start(labels, 4);
        if (!start.all_nonempty()) start = d.truth;
        HLloydConfig cfg;
        cfg.r = 4;
        const auto res = hlloyd_refine(d.y, start, cfg);
        bool ok = true;
        for (std::size_t t = 1; t < res.residual_trace.size(); ++t) {
            ok = ok && res.residual_trace[t] <= res.residual_trace[t - 1];
        }
        ++runs;
        monotone += ok;
        transitions += res.residual_trace.size() - 1;
    }
    return {monotone == runs, std::to_string(monotone) + "/" + std::to_string(runs) +
                                  " runs nonincreasing at every step (" + std::to_string(transitions) + " steps checked)"};
}

Outcome bic_selection() {
    const std::vector<std::size_t> rs = {2, 3, 4, 5, 6, 7, 8};
    std::size_t hits = 0;
    std::string picks;
    for (std::size_t s = 0; s < kSeeds; ++s) {
        const auto d = generate(planted(s));
        const auto sel = select_r(d.y, rs, derive_seed(s, {9}));
        hits += sel.best_r == 4;
        picks += (picks.empty() ? "" : ",") + std::to_string(sel.best_r);
    }
    return {hits >= 18, std::to_string(hits) + "/20 seeds chose r = 4 (picks " + picks + ")"};
}

// --- metrics -----------------------------------------------------------------

Outcome metric_oracles() {
    Rng rng(77);
    std::size_t auroc_exact = 0, auprc_close = 0;
    double worst = 0.0;
    for (std::size_t trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.index(199);
        const std::size_t levels = 1 + rng.index(n);  // few levels means many ties
        std::vector<int> y(n);
        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.bernoulli(0.3 + 0.4 * rng.uniform()) ? 1 : 0;
            s[i] = static_cast<double>(rng.index(levels)) / static_cast<double>(levels);
        }
        const std::size_t i = rng.index(n), j = (i + 1 + rng.index(n - 1)) % n;
        y[i] = 1;
        y[j] = 0;
        auroc_exact += auroc(y, s) == oracle::auroc(y, s);
        const double diff = std::abs(auprc(y, s) - oracle::auprc(y, s));
        worst = std::max(worst, diff);
        auprc_close += diff <= 1e-12;
    }
    return {auroc_exact == 200 && auprc_close == 200,
            "AUROC exact " + std::to_string(auroc_exact) + "/200, AUPRC within 1e-12 " + std::to_string(auprc_close) +
                "/200 (worst " + fmt("%.1e", worst) + ")"};
}

// --- nested cross-validation --------------------------------------------------

std::vector<GbdtHyperparams> acceptance_grid(std::uint64_t seed) {
    std::vector<GbdtHyperparams> g;
    for (std::size_t trees : {50, 100})
        for (std::size_t depth : {2, 3})
            for (double sub : {0.8, 1.0}) {
                GbdtHyperparams hp;
                hp.n_trees = trees;
                hp.max_depth = depth;
                hp.subsample = sub;
                hp.seed = seed;
                g.push_back(hp);
            }
    return g;
}

FeatureTable labeled_features(const LabeledData& d) {
    return assemble_features(d.planted.y, d.planted.truth, d.covariates, d.labels, d.subject_ids);
}

LabeledData labeled(std::size_t n, std::size_t p, std::size_t r, double effect, std::uint64_t seed) {
    PlantedSpec spec;
    spec.n_subjects = n;
    spec.p = p;
    spec.r_true = r;
    spec.seed = seed;
    LabelSpec ls;
    ls.effect = effect;
    return generate_labeled(spec, ls);
}

Outcome nested_cv_integrity() {
    // Leakage audit on the full protocol shape.
    const auto d = labeled(60, 20, 4, 3.0, 101);
    const auto table = labeled_features(d);
    CvProtocol proto{10, 3, 5, 11, true};
    std::mutex mu;
    std::size_t fits = 0, leaks = 0;
    std::map<std::pair<std::size_t, std::size_t>, std::set<std::size_t>> outer_test;
    std::vector<std::tuple<std::size_t, std::size_t, std::vector<std::size_t>>> inner_rows;
    NestedCvOptions opts;
    opts.observer = [&](const FitEvent& e) {
        std::set<std::size_t> train(e.train.begin(), e.train.end());
        std::size_t local = 0;
        for (auto r : e.evaluate) local += train.contains(r);
        std::lock_guard lock(mu);
        ++fits;
        leaks += local;
        if (e.inner_fold < 0) {
            outer_test[{e.repeat, e.outer_fold}].insert(e.evaluate.begin(), e.evaluate.end());
        } else {
            std::vector<std::size_t> rows(e.train.begin(), e.train.end());
            rows.insert(rows.end(), e.evaluate.begin(), e.evaluate.end());
            inner_rows.emplace_back(e.repeat, e.outer_fold, std::move(rows));
        }
    };
    nested_cv(table, acceptance_grid(1), proto, opts);
    for (const auto& [rep, fold, rows] : inner_rows) {
        const auto& test = outer_test[{rep, fold}];
        for (auto r : rows) leaks += test.contains(r);
    }
    bool partitions = outer_test.size() == proto.n_repeats * proto.outer_folds;
    for (std::size_t rep = 0; rep < proto.n_repeats; ++rep) {
        std::set<std::size_t> all;
        std::size_t total = 0;
        for (std::size_t f = 0; f < proto.outer_folds; ++f) {
            total += outer_test[{rep, f}].size();
            all.insert(outer_test[{rep, f}].begin(), outer_test[{rep, f}].end());
        }
        partitions = partitions && total == table.n_rows() && all.size() == table.n_rows();
    }

    // Permuted labels: no signal left to learn.
    auto strong = labeled(200, 20, 4, 3.0, 202);
    auto shuffled = strong.labels;
    Rng rng(303);
    rng.shuffle(std::span<int>(shuffled));
    const auto permuted_table = labeled_features(strong).with_labels(shuffled);
    const auto permuted = nested_cv(permuted_table, acceptance_grid(2), CvProtocol{10, 3, 20, 13, true});

    // Labels a deterministic function of one block mean.
    const auto sep = labeled(200, 20, 4, 50.0, 404);
    const auto separable = nested_cv(labeled_features(sep), acceptance_grid(3), CvProtocol{10, 3, 20, 17, true});

    const double perm_acc = permuted.report.accuracy.mean;
    const double sep_acc = separable.report.accuracy.mean;
    const bool pass = leaks == 0 && partitions && perm_acc >= 0.4 && perm_acc <= 0.6 && sep_acc >= 0.95;
    return {pass, std::to_string(fits) + " fits audited, " + std::to_string(leaks) + " leaked rows, outer folds " +
                      (partitions ? "partition" : "do NOT partition") + " the rows; permuted accuracy " +
                      fmt("%.3f", perm_acc) + " over 20 repeats; separable accuracy " + fmt("%.3f", sep_acc)};
}

// --- features ----------------------------------------------------------------

Outcome feature_arithmetic() {
    PlantedSpec spec;
    spec.n_subjects = 5;
    spec.p = 30;
    spec.r_true = 6;
    const auto d6 = generate_labeled(spec, LabelSpec{});
    const auto t6 = labeled_features(d6);

    Rng rng(5);
    const auto y246 = oracle::random_tensor({2, 2, 246, 246}, rng);
    Covariates cov;
    cov.age = {30, 40};
    cov.gender = {0, 1};
    cov.race = {1, 0};
    cov.hiv = {0, 1};
    const auto raw = raw_features(y246, cov, {0, 1});

    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t p = 6 + rng.index(10), r = 1 + rng.index(5);
        const auto y = oracle::random_tensor({2, 2, p, p}, rng);
        std::vector<std::uint32_t> labels(p);
        for (std::size_t j = 0; j < p; ++j) labels[j] = static_cast<std::uint32_t>(j < r ? j : rng.index(r));
        const Membership z(labels, r);
        const auto s = block_means(y, z);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t a = 0; a < r; ++a)
                    for (std::size_t b = 0; b < r; ++b)
                        worst = std::max(worst, std::abs(s(i, k, a, b) - oracle::block_mean(y, z, i, k, a, b)));
    }
    const bool pass = t6.n_features() == 46 && raw.n_features() == 60766 && worst <= 1e-12;
    return {pass, "r = 6 gives " + std::to_string(t6.n_features()) + " columns; p = 246 raw gives " +
                      std::to_string(raw.n_features()) + "; block means off by at most " + fmt("%.1e", worst)};
}

Outcome importance_sanity() {
    std::size_t first = 0;
    std::string misses;
    GbdtHyperparams hp;
    hp.n_trees = 100;
    hp.max_depth = 2;
    for (std::size_t s = 0; s < kSeeds; ++s) {
        const auto d = labeled(120, 20, 4, 3.0, 500 + s);
        const auto table = labeled_features(d);
        const auto imp = feature_importance(table, hp, CvProtocol{5, 2, 1, derive_seed(s, {1}), true});
        const std::string want = feature_name("str", 1, 2);
        if (imp.front().feature == want) {
            ++first;
        } else {
            misses += " seed" + std::to_string(s) + ":" + imp.front().feature;
        }
    }
    return {first >= 18, std::to_string(first) + "/20 seeds rank the signal block first" + (misses.empty() ? "" : ";" + misses)};
}

// --- end to end ---------------------------------------------------------------

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::ifstream in(entry.path(), std::ios::binary);
        files[entry.path().filename().string()] = std::string(std::istreambuf_iterator<char>(in), {});
    }
    return files;
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "tbm_acceptance_e2e";
    fs::remove_all(root);
    RunConfig cfg;
    cfg.r_values = {2, 3, 4, 5, 6, 7, 8};
    cfg.synth_labels.effect = 3.0;
    cfg.reseed(2024);
    const auto data = generate_labeled(cfg.synth, cfg.synth_labels);
    const auto manifest = write_dataset(root / "data", data.planted.y, data.covariates, data.labels, data.subject_ids);

    const auto t0 = Clock::now();
    const auto first = run_pipeline(cfg, manifest, root / "run1");
    const double secs = seconds_since(t0);
    cfg.workers = 4;  // scheduling must not matter
    run_pipeline(cfg, manifest, root / "run2");

    const auto a = snapshot(root / "run1"), b = snapshot(root / "run2");
    std::size_t differing = 0;
    for (const auto& [name, bytes] : a) differing += !b.contains(name) || b.at(name) != bytes;
    differing += b.size() - std::min(b.size(), a.size());
    const double mis = misclustering_rate(read_membership(root / "run1" / "membership_r4.csv"), data.planted.truth);
    fs::remove_all(root);
    const bool pass = differing == 0 && !a.empty() && secs < 300.0;
    return {pass, std::to_string(a.size()) + " artifacts, " + std::to_string(differing) + " differ; one run " +
                      fmt("%.1f", secs) + " s; BIC r " + std::to_string(first.best_r) + ", misclustering " +
                      fmt("%.3f", mis) + ", accuracy " + fmt("%.3f", first.report.accuracy.mean)};
}

Outcome baseline_parity() {
    std::size_t wins = 0;
    std::string gaps;
    for (std::size_t s = 0; s < kSeeds; ++s) {
        const auto d = labeled(80, 40, 4, 3.0, 900 + s);
        const auto learned_z = hlloyd_refine(d.planted.y, phsc_init(d.planted.y, 4, s), HLloydConfig{4}).membership;
        const auto learned = assemble_features(d.planted.y, learned_z, d.covariates, d.labels, d.subject_ids);
        std::vector<std::uint32_t> lobes(40);
        for (std::size_t j = 0; j < 40; ++j) lobes[j] = static_cast<std::uint32_t>(j / 10);
        const auto atlas = atlas_features(d.planted.y, AtlasClusterMap(Membership(lobes, 4)), d.covariates, d.labels,
                                          d.subject_ids);
        const CvProtocol proto{10, 3, 3, derive_seed(s, {5}), true};
        const double acc_learned = nested_cv(learned, acceptance_grid(s), proto).report.accuracy.mean;
        const double acc_atlas = nested_cv(atlas, acceptance_grid(s), proto).report.accuracy.mean;
        wins += acc_learned >= acc_atlas;
        gaps += (gaps.empty() ? "" : ",") + fmt("%+.2f", acc_learned - acc_atlas);
    }
    return {wins >= 15, std::to_string(wins) + "/20 paired seeds with learned >= atlas (gaps " + gaps + ")"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"tensor algebra identities", tensor_suite},
        {"planted recovery", planted_recovery},
        {"monotone HLloyd residual", monotone_hlloyd},
        {"BIC selects planted r", bic_selection},
        {"metric oracles", metric_oracles},
        {"nested CV integrity", nested_cv_integrity},
        {"feature arithmetic", feature_arithmetic},
        {"importance sanity", importance_sanity},
        {"determinism and runtime", determinism},
        {"baseline parity", baseline_parity},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        const auto t0 = Clock::now();
        Outcome out;
        try {
            out = check();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        failures += !out.pass;
        std::printf("%s  %-28s %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", name, out.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
