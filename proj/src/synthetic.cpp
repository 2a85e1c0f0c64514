#include "tbm/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

#include "tbm/error.hpp"
#include "tbm/random.hpp"

namespace tbm {
namespace {

Membership draw_membership(const PlantedSpec& spec, Rng& rng) {
    std::vector<std::uint32_t> labels;
    labels.reserve(spec.p);
    if (spec.cluster_sizes.empty()) {
        for (std::size_t j = 0; j < spec.p; ++j) labels.push_back(static_cast<std::uint32_t>(j % spec.r_true));
    } else {
        for (std::size_t a = 0; a < spec.cluster_sizes.size(); ++a)
            labels.insert(labels.end(), spec.cluster_sizes[a], static_cast<std::uint32_t>(a));
    }
    rng.shuffle(labels);
    return Membership(std::move(labels), spec.r_true);
}

bool profiles_distinct(const DenseTensor& core) {
    const std::size_t n = core.dim(0), m = core.dim(1), r = core.dim(2);
    for (std::size_t a = 0; a < r; ++a) {
        for (std::size_t a2 = a + 1; a2 < r; ++a2) {
            bool same = true;
            for (std::size_t i = 0; i < n && same; ++i)
                for (std::size_t k = 0; k < m && same; ++k)
                    for (std::size_t b = 0; b < r && same; ++b)
                        same = core(i, k, a, b) == core(i, k, a2, b) && core(i, k, b, a) == core(i, k, b, a2);
            if (same) return false;
        }
    }
    return true;
}

DenseTensor draw_core(const PlantedSpec& spec, Rng& rng) {
    const std::size_t r = spec.r_true;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        DenseTensor core({spec.n_subjects, spec.n_modalities, r, r});
        for (std::size_t i = 0; i < spec.n_subjects; ++i) {
            for (std::size_t k = 0; k < spec.n_modalities; ++k) {
                for (std::size_t a = 0; a < r; ++a) {
                    for (std::size_t b = spec.symmetric ? a : 0; b < r; ++b) {
                        const double v = spec.core_gap * static_cast<double>(rng.index(spec.grid_levels));
                        core(i, k, a, b) = v;
                        if (spec.symmetric) core(i, k, b, a) = v;
                    }
                }
            }
        }
        if (r == 1 || profiles_distinct(core)) return core;
    }
    throw ArgumentError("generate: could not draw a core with distinct cluster profiles; increase grid_levels");
}

DenseTensor draw_noise(const PlantedSpec& spec, Rng& rng) {
    DenseTensor noise({spec.n_subjects, spec.n_modalities, spec.p, spec.p});
    if (spec.noise_sigma == 0.0) return noise;
    for (std::size_t i = 0; i < spec.n_subjects; ++i) {
        for (std::size_t k = 0; k < spec.n_modalities; ++k) {
            for (std::size_t j4 = 0; j4 < spec.p; ++j4) {
                for (std::size_t j3 = spec.symmetric ? j4 : 0; j3 < spec.p; ++j3) {
                    const double e = spec.noise_sigma * rng.normal();
                    noise(i, k, j3, j4) = e;
                    if (spec.symmetric) noise(i, k, j4, j3) = e;
                }
            }
        }
    }
    return noise;
}

// Hungarian algorithm (shortest augmenting path) for a square cost matrix;
// returns assignment row -> column minimizing total cost.
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    for (std::size_t row = 1; row <= n; ++row) {
        match[0] = row;
        std::size_t col0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[col0] = true;
            const std::size_t r0 = match[col0];
            double delta = inf;
            std::size_t col1 = 0;
            for (std::size_t c = 1; c <= n; ++c) {
                if (used[c]) continue;
                const double cur = cost[r0 - 1][c - 1] - u[r0] - v[c];
                if (cur < minv[c]) {
                    minv[c] = cur;
                    way[c] = col0;
                }
                if (minv[c] < delta) {
                    delta = minv[c];
                    col1 = c;
                }
            }
            for (std::size_t c = 0; c <= n; ++c) {
                if (used[c]) {
                    u[match[c]] += delta;
                    v[c] -= delta;
                } else {
                    minv[c] -= delta;
                }
            }
            col0 = col1;
        } while (match[col0] != 0);
        do {
            const std::size_t col1 = way[col0];
            match[col0] = match[col1];
            col0 = col1;
        } while (col0 != 0);
    }
    std::vector<std::size_t> assignment(n);
    for (std::size_t c = 1; c <= n; ++c) assignment[match[c] - 1] = c - 1;
    return assignment;
}

// perm[estimate label] = truth label maximizing agreement.
std::vector<std::size_t> best_matching(const Membership& estimate, const Membership& truth, std::size_t& agreed) {
    if (estimate.size() != truth.size()) {
        throw ArgumentError("misclustering_rate: labelings have lengths " + std::to_string(estimate.size()) + " and " +
                            std::to_string(truth.size()));
    }
    const std::size_t k = std::max(estimate.r(), truth.r());
    std::vector<std::vector<double>> cost(k, std::vector<double>(k, 0.0));
    for (std::size_t j = 0; j < estimate.size(); ++j) cost[estimate[j]][truth[j]] -= 1.0;
    auto assignment = hungarian(cost);
    agreed = 0;
    for (std::size_t a = 0; a < k; ++a) agreed += static_cast<std::size_t>(-cost[a][assignment[a]]);
    return assignment;
}

}  // namespace

void PlantedSpec::validate() const {
    if (n_subjects == 0 || n_modalities == 0 || p == 0) throw ArgumentError("PlantedSpec: dimensions must be positive");
    if (r_true == 0 || r_true > p) throw ArgumentError("PlantedSpec: r_true must be in [1, p]");
    if (!(core_gap > 0.0)) throw ArgumentError("PlantedSpec: core_gap must be positive");
    if (grid_levels < 2) throw ArgumentError("PlantedSpec: grid_levels must be at least 2");
    if (noise_sigma < 0.0) throw ArgumentError("PlantedSpec: noise_sigma must be nonnegative");
    if (!cluster_sizes.empty()) {
        if (cluster_sizes.size() != r_true) throw ArgumentError("PlantedSpec: cluster_sizes must have r_true entries");
        if (std::accumulate(cluster_sizes.begin(), cluster_sizes.end(), std::size_t{0}) != p)
            throw ArgumentError("PlantedSpec: cluster_sizes must sum to p");
        if (std::ranges::count(cluster_sizes, std::size_t{0}) != 0)
            throw ArgumentError("PlantedSpec: every planted cluster needs at least one ROI");
    }
}

PlantedData generate(const PlantedSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    PlantedData out;
    out.truth = draw_membership(spec, rng);
    DenseTensor core = draw_core(spec, rng);
    out.noise = draw_noise(spec, rng);

    const DenseMatrix m = out.truth.indicator();
    const ModeFactor factors[] = {{m, 2}, {m, 3}};
    out.y = multilinear_product(core, factors);
    auto yd = out.y.data();
    auto nd = out.noise.data();
    for (std::size_t i = 0; i < yd.size(); ++i) yd[i] += nd[i];
    out.core = CoreTensor(std::move(core));
    return out;
}

double misclustering_rate(const Membership& estimate, const Membership& truth) {
    std::size_t agreed = 0;
    best_matching(estimate, truth, agreed);
    if (truth.size() == 0) return 0.0;
    return 1.0 - static_cast<double>(agreed) / static_cast<double>(truth.size());
}

Membership align_to(const Membership& estimate, const Membership& truth) {
    if (estimate.r() != truth.r()) throw ArgumentError("align_to: cluster counts differ");
    std::size_t agreed = 0;
    const auto assignment = best_matching(estimate, truth, agreed);
    std::vector<std::uint32_t> perm(assignment.begin(), assignment.end());
    return estimate.relabeled(perm);
}

LabeledData generate_labeled(const PlantedSpec& spec, const LabelSpec& label_spec) {
    if (label_spec.effect < 0.0) throw ArgumentError("generate_labeled: effect must be nonnegative");
    if (!(label_spec.prevalence > 0.0 && label_spec.prevalence < 1.0))
        throw ArgumentError("generate_labeled: prevalence must be in (0, 1)");
    if (label_spec.signal_modality >= spec.n_modalities || label_spec.signal_a >= spec.r_true ||
        label_spec.signal_b >= spec.r_true) {
        throw ArgumentError("generate_labeled: signal block out of range");
    }
    LabeledData out;
    out.planted = generate(spec);

    // Separate stream so labels never perturb the tensor draws.
    Rng rng(derive_seed(spec.seed, {0x1ABE1ull}));
    const double centre = spec.core_gap * static_cast<double>(spec.grid_levels - 1) / 2.0;
    const double base = std::log(label_spec.prevalence / (1.0 - label_spec.prevalence));
    const std::size_t n = spec.n_subjects;
    out.labels.resize(n);
    out.covariates.age.resize(n);
    out.covariates.gender.resize(n);
    out.covariates.race.resize(n);
    out.covariates.hiv.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double signal =
            out.planted.core(i, label_spec.signal_modality, label_spec.signal_a, label_spec.signal_b);
        const double logit = base + label_spec.effect * (signal - centre) / spec.core_gap;
        out.labels[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-logit))) ? 1 : 0;
        out.covariates.age[i] = std::round((41.0 + 9.0 * rng.normal()) * 10.0) / 10.0;
        out.covariates.gender[i] = rng.bernoulli(0.7) ? 1.0 : 0.0;
        out.covariates.race[i] = rng.bernoulli(0.7) ? 1.0 : 0.0;
        out.covariates.hiv[i] = rng.bernoulli(0.6) ? 1.0 : 0.0;
        char id[16];
        std::snprintf(id, sizeof id, "sub%04zu", i + 1);
        out.subject_ids.emplace_back(id);
    }
    return out;
}

}  // namespace tbm
