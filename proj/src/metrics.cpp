#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "tbm/error.hpp"
#include "tbm/evaluation.hpp"

namespace tbm {
namespace {

void check_lengths(std::span<const int> labels, std::span<const double> scores, const char* op) {
    if (labels.size() != scores.size()) throw ArgumentError(std::string(op) + ": labels and scores differ in length");
    if (labels.empty()) throw ArgumentError(std::string(op) + ": empty input");
}

// Descending-score groups of tied scores: (score, positives, negatives).
struct TieGroup {
    double score;
    std::size_t pos;
    std::size_t neg;
};

std::vector<TieGroup> tie_groups(std::span<const int> labels, std::span<const double> scores) {
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::ranges::sort(order, [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<TieGroup> groups;
    for (auto i : order) {
        if (groups.empty() || scores[i] != groups.back().score) groups.push_back({scores[i], 0, 0});
        (labels[i] == 1 ? groups.back().pos : groups.back().neg) += 1;
    }
    return groups;
}

std::size_t count_positives(std::span<const int> labels) {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

}  // namespace

double accuracy(std::span<const int> labels, std::span<const double> scores, double threshold) {
    check_lengths(labels, scores, "accuracy");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int predicted = scores[i] >= threshold ? 1 : 0;
        if (predicted == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double auroc(std::span<const int> labels, std::span<const double> scores) {
    check_lengths(labels, scores, "auroc");
    const std::size_t pos = count_positives(labels);
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) throw MetricError("auroc: both classes are required");
    // Twice the Mann-Whitney statistic, counted exactly in integers.
    unsigned long long twice = 0;
    std::size_t neg_below = neg;
    for (const auto& g : tie_groups(labels, scores)) {
        neg_below -= g.neg;
        twice += 2ULL * g.pos * neg_below + 1ULL * g.pos * g.neg;
    }
    return static_cast<double>(twice) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

std::vector<PrPoint> pr_curve(std::span<const int> labels, std::span<const double> scores) {
    check_lengths(labels, scores, "pr_curve");
    const std::size_t pos = count_positives(labels);
    if (pos == 0) throw MetricError("pr_curve: no positive labels");
    std::vector<PrPoint> out;
    std::size_t tp = 0, fp = 0;
    for (const auto& g : tie_groups(labels, scores)) {
        tp += g.pos;
        fp += g.neg;
        out.push_back({g.score, static_cast<double>(tp) / static_cast<double>(tp + fp),
                       static_cast<double>(tp) / static_cast<double>(pos)});
    }
    return out;
}

std::vector<RocPoint> roc_curve(std::span<const int> labels, std::span<const double> scores) {
    check_lengths(labels, scores, "roc_curve");
    const std::size_t pos = count_positives(labels);
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) throw MetricError("roc_curve: both classes are required");
    std::vector<RocPoint> out;
    out.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    for (const auto& g : tie_groups(labels, scores)) {
        tp += g.pos;
        fp += g.neg;
        out.push_back({g.score, static_cast<double>(fp) / static_cast<double>(neg),
                       static_cast<double>(tp) / static_cast<double>(pos)});
    }
    return out;
}

double auprc(std::span<const int> labels, std::span<const double> scores) {
    double area = 0.0;
    double prev_recall = 0.0;
    for (const auto& pt : pr_curve(labels, scores)) {
        area += (pt.recall - prev_recall) * pt.precision;
        prev_recall = pt.recall;
    }
    return area;
}

double min_re_p(std::span<const int> labels, std::span<const double> scores) {
    double best = 0.0;
    for (const auto& pt : pr_curve(labels, scores)) best = std::max(best, std::min(pt.precision, pt.recall));
    return best;
}

FoldMetrics score_all(std::span<const int> labels, std::span<const double> probabilities) {
    return {accuracy(labels, probabilities), auroc(labels, probabilities), auprc(labels, probabilities),
            min_re_p(labels, probabilities)};
}

MetricReport summarize(std::span<const FoldMetrics> per_repeat) {
    if (per_repeat.empty()) throw ArgumentError("summarize: no repeats");
    auto summary = [&](double FoldMetrics::*field) {
        MetricSummary s{0.0, per_repeat.front().*field, per_repeat.front().*field};
        for (const auto& m : per_repeat) {
            s.mean += m.*field;
            s.max = std::max(s.max, m.*field);
            s.min = std::min(s.min, m.*field);
        }
        s.mean /= static_cast<double>(per_repeat.size());
        // Keep min <= mean <= max exact despite rounding in the sum.
        s.mean = std::clamp(s.mean, s.min, s.max);
        return s;
    };
    MetricReport r;
    r.accuracy = summary(&FoldMetrics::accuracy);
    r.auroc = summary(&FoldMetrics::auroc);
    r.auprc = summary(&FoldMetrics::auprc);
    r.min_re_p = summary(&FoldMetrics::min_re_p);
    r.n_repeats = per_repeat.size();
    return r;
}

std::string format_report(const MetricReport& report, const std::string& title) {
    std::string out;
    char line[128];
    if (!title.empty()) out += title + "\n";
    std::snprintf(line, sizeof line, "%-12s %s\n", "metric", "mean (max, min)");
    out += line;
    auto row = [&](const char* name, const MetricSummary& s) {
        std::snprintf(line, sizeof line, "%-12s %.3f (%.3f, %.3f)\n", name, s.mean, s.max, s.min);
        out += line;
    };
    row("accuracy", report.accuracy);
    row("auroc", report.auroc);
    row("auprc", report.auprc);
    row("min_re_p", report.min_re_p);
    std::snprintf(line, sizeof line, "repeats      %zu\n", report.n_repeats);
    out += line;
    return out;
}

}  // namespace tbm
