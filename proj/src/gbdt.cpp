#include "tbm/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tbm/error.hpp"
#include "tbm/random.hpp"

namespace tbm {
namespace {

constexpr double kMinGain = 1e-12;
constexpr double kProbEps = 1e-15;

double sigmoid(double m) {
    const double p = m >= 0.0 ? 1.0 / (1.0 + std::exp(-m)) : std::exp(m) / (1.0 + std::exp(m));
    return std::clamp(p, kProbEps, 1.0 - kProbEps);
}

struct NodeStats {
    double g = 0.0;
    double h = 0.0;
    std::size_t count = 0;
};

struct SplitCandidate {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

// Scan state for one node while walking a feature in sorted order.
struct ScanState {
    NodeStats left;
    double last_value = 0.0;
    bool started = false;
};

double score(double g, double h) { return g * g / (h + kLeafL2); }

class TreeBuilder {
public:
    TreeBuilder(const DenseMatrix& x, const std::vector<std::vector<std::size_t>>& sorted, const GbdtHyperparams& hp)
        : x_(x), sorted_(sorted), hp_(hp) {}

    RegressionTree build(const std::vector<double>& grad, const std::vector<double>& hess,
                         const std::vector<std::size_t>& sample) {
        const std::size_t n = x_.rows();
        node_of_.assign(n, -1);
        RegressionTree tree;
        tree.nodes.emplace_back();
        std::vector<NodeStats> stats(1);
        for (auto i : sample) {
            node_of_[i] = 0;
            stats[0].g += grad[i];
            stats[0].h += hess[i];
            ++stats[0].count;
        }

        std::vector<std::size_t> frontier{0};
        for (std::size_t depth = 0; depth < hp_.max_depth && !frontier.empty(); ++depth) {
            std::vector<SplitCandidate> best(tree.nodes.size());
            std::vector<ScanState> scan(tree.nodes.size());
            std::vector<bool> active(tree.nodes.size(), false);
            for (auto nd : frontier)
                if (stats[nd].count >= 2 * hp_.min_samples_leaf) active[nd] = true;

            for (std::size_t f = 0; f < x_.cols(); ++f) {
                for (auto nd : frontier) scan[nd] = ScanState{};
                const auto column = x_.col(f);
                for (auto i : sorted_[f]) {
                    const int nd = node_of_[i];
                    if (nd < 0 || !active[static_cast<std::size_t>(nd)]) continue;
                    auto& st = scan[static_cast<std::size_t>(nd)];
                    const double v = column[i];
                    if (st.started && v != st.last_value) {
                        consider(best[static_cast<std::size_t>(nd)], stats[static_cast<std::size_t>(nd)], st.left,
                                 static_cast<int>(f), st.last_value, v);
                    }
                    st.left.g += grad[i];
                    st.left.h += hess[i];
                    ++st.left.count;
                    st.last_value = v;
                    st.started = true;
                }
            }

            std::vector<std::size_t> next;
            for (auto nd : frontier) {
                const SplitCandidate c = best[nd];
                if (c.feature < 0) continue;
                const auto left = static_cast<std::uint32_t>(tree.nodes.size());
                tree.nodes.emplace_back();
                tree.nodes.emplace_back();
                stats.resize(tree.nodes.size());
                tree.nodes[nd].feature = c.feature;
                tree.nodes[nd].threshold = c.threshold;
                tree.nodes[nd].left = left;
                tree.nodes[nd].right = left + 1;
                next.push_back(left);
                next.push_back(left + 1);
            }
            if (next.empty()) break;
            // Route sampled rows into the new children.
            for (std::size_t i = 0; i < n; ++i) {
                const int nd = node_of_[i];
                if (nd < 0) continue;
                const auto& node = tree.nodes[static_cast<std::size_t>(nd)];
                if (node.is_leaf()) continue;
                const std::uint32_t child =
                    x_(i, static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left : node.right;
                node_of_[i] = static_cast<int>(child);
                stats[child].g += grad[i];
                stats[child].h += hess[i];
                ++stats[child].count;
            }
            frontier = std::move(next);
        }

        for (std::size_t nd = 0; nd < tree.nodes.size(); ++nd) {
            if (tree.nodes[nd].is_leaf()) tree.nodes[nd].value = -stats[nd].g / (stats[nd].h + kLeafL2);
        }
        return tree;
    }

private:
    void consider(SplitCandidate& best, const NodeStats& total, const NodeStats& left, int feature, double lower,
                  double upper) const {
        const std::size_t right_count = total.count - left.count;
        if (left.count < hp_.min_samples_leaf || right_count < hp_.min_samples_leaf) return;
        const double gl = left.g;
        const double hl = left.h;
        const double gr = total.g - gl;
        const double hr = total.h - hl;
        const double gain = 0.5 * (score(gl, hl) + score(gr, hr) - score(total.g, total.h));
        if (gain <= kMinGain || gain <= best.gain) return;
        double threshold = lower + 0.5 * (upper - lower);
        if (!(threshold < upper)) threshold = lower;
        best = SplitCandidate{gain, feature, threshold};
    }

    const DenseMatrix& x_;
    const std::vector<std::vector<std::size_t>>& sorted_;
    const GbdtHyperparams& hp_;
    std::vector<int> node_of_;
};

}  // namespace

void GbdtHyperparams::validate() const {
    if (n_trees == 0) throw ArgumentError("GbdtHyperparams: n_trees must be positive");
    if (max_depth == 0) throw ArgumentError("GbdtHyperparams: max_depth must be positive");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw ArgumentError("GbdtHyperparams: learning_rate must be in (0, 1]");
    if (!(subsample > 0.0 && subsample <= 1.0)) throw ArgumentError("GbdtHyperparams: subsample must be in (0, 1]");
    if (min_samples_leaf == 0) throw ArgumentError("GbdtHyperparams: min_samples_leaf must be positive");
}

double RegressionTree::predict(const DenseMatrix& x, std::size_t row) const {
    std::size_t nd = 0;
    while (!nodes[nd].is_leaf()) {
        const auto& node = nodes[nd];
        nd = x(row, static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left : node.right;
    }
    return nodes[nd].value;
}

GbdtModel fit(const FeatureTable& table, const GbdtHyperparams& hp) { return fit(table.values(), table.labels(), hp); }

GbdtModel fit(const DenseMatrix& x, std::span<const int> labels, const GbdtHyperparams& hp) {
    hp.validate();
    const std::size_t n = x.rows();
    if (labels.size() != n) throw DataError("fit: label count differs from row count");
    if (n < 2) throw DataError("fit: at least two samples are required");
    const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    if (positives == 0 || positives == n) throw DataError("fit: training labels contain a single class");

    std::vector<std::vector<std::size_t>> sorted(x.cols());
    for (std::size_t f = 0; f < x.cols(); ++f) {
        auto& order = sorted[f];
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
        const auto column = x.col(f);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });
    }

    GbdtModel model;
    model.n_features = x.cols();
    model.learning_rate = hp.learning_rate;
    const double prevalence = static_cast<double>(positives) / static_cast<double>(n);
    model.base_score = std::log(prevalence / (1.0 - prevalence));

    std::vector<double> margin(n, model.base_score);
    std::vector<double> grad(n), hess(n);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    const auto sample_size = std::max<std::size_t>(
        1, std::min(n, static_cast<std::size_t>(std::llround(hp.subsample * static_cast<double>(n)))));

    Rng rng(hp.seed);
    TreeBuilder builder(x, sorted, hp);
    model.trees.reserve(hp.n_trees);
    for (std::size_t t = 0; t < hp.n_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(margin[i]);
            grad[i] = p - labels[i];
            hess[i] = p * (1.0 - p);
        }
        std::vector<std::size_t> sample;
        if (sample_size == n) {
            sample = all;
        } else {
            // Partial Fisher-Yates, then sorted so row order is stable.
            std::vector<std::size_t> pool = all;
            for (std::size_t k = 0; k < sample_size; ++k) std::swap(pool[k], pool[k + rng.index(n - k)]);
            sample.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(sample_size));
            std::ranges::sort(sample);
        }
        RegressionTree tree = builder.build(grad, hess, sample);
        for (std::size_t i = 0; i < n; ++i) margin[i] += hp.learning_rate * tree.predict(x, i);
        model.trees.push_back(std::move(tree));
    }
    return model;
}

std::vector<double> predict_proba(const GbdtModel& m, const DenseMatrix& rows) {
    return predict_proba(m, rows, m.trees.size());
}

std::vector<double> predict_proba(const GbdtModel& m, const DenseMatrix& rows, std::size_t n_trees) {
    if (rows.cols() != m.n_features) {
        throw DataError("predict_proba: rows have " + std::to_string(rows.cols()) + " features, model expects " +
                        std::to_string(m.n_features));
    }
    n_trees = std::min(n_trees, m.trees.size());
    std::vector<double> out(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t t = 0; t < n_trees; ++t) sum += m.trees[t].predict(rows, i);
        out[i] = sigmoid(m.base_score + m.learning_rate * sum);
    }
    return out;
}

double log_loss(std::span<const int> labels, std::span<const double> probabilities) {
    if (labels.size() != probabilities.size() || labels.empty()) throw ArgumentError("log_loss: length mismatch or empty");
    double s = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double p = std::clamp(probabilities[i], kProbEps, 1.0 - kProbEps);
        s -= labels[i] == 1 ? std::log(p) : std::log1p(-p);
    }
    return s / static_cast<double>(labels.size());
}

}  // namespace tbm
