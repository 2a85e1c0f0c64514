#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tbm/features.hpp"
#include "tbm/gbdt.hpp"

namespace tbm {

// --- metrics ---------------------------------------------------------------
//
// Labels are 0/1; scores are any real values where larger means "more likely
// positive". Only the ordering of scores matters except for accuracy.

/// Fraction of rows where (score >= threshold) matches the label.
double accuracy(std::span<const int> labels, std::span<const double> scores, double threshold = 0.5);

/// P(score+ > score-) + 1/2 P(tie) over all positive/negative pairs.
double auroc(std::span<const int> labels, std::span<const double> scores);

/// One operating point per distinct score, sweeping from the highest.
struct PrPoint {
    double threshold;
    double precision;
    double recall;
};
std::vector<PrPoint> pr_curve(std::span<const int> labels, std::span<const double> scores);

struct RocPoint {
    double threshold;
    double false_positive_rate;
    double true_positive_rate;
};
std::vector<RocPoint> roc_curve(std::span<const int> labels, std::span<const double> scores);

/// Step-wise area under the PR curve: sum of (R_k - R_{k-1}) * P_k.
double auprc(std::span<const int> labels, std::span<const double> scores);

/// Max over PR operating points of min(precision, recall).
double min_re_p(std::span<const int> labels, std::span<const double> scores);

/// Ranking metrics are NaN for a held-out fold with a single class.
struct FoldMetrics {
    double accuracy = 0.0;
    double auroc = 0.0;
    double auprc = 0.0;
    double min_re_p = 0.0;
};

FoldMetrics score_all(std::span<const int> labels, std::span<const double> probabilities);

// --- cross-validation ------------------------------------------------------

struct CvProtocol {
    std::size_t outer_folds = 10;
    std::size_t inner_folds = 3;
    std::size_t n_repeats = 100;
    std::uint64_t seed = 0;
    bool stratified = true;

    void validate() const;
};

/// Fold id per sample. Stratified assignment deals each class round-robin
/// after a seeded shuffle, so fold sizes and class counts differ by at most one.
std::vector<std::size_t> make_folds(std::span<const int> labels, std::size_t k, bool stratified, std::uint64_t seed);

struct MetricSummary {
    double mean = 0.0;
    double max = 0.0;
    double min = 0.0;
};

struct MetricReport {
    MetricSummary accuracy;
    MetricSummary auroc;
    MetricSummary auprc;
    MetricSummary min_re_p;
    std::size_t n_repeats = 0;
};

MetricReport summarize(std::span<const FoldMetrics> per_repeat);

struct RepeatResult {
    FoldMetrics mean;                       // averaged over outer folds
    std::vector<FoldMetrics> folds;         // one per outer fold
    std::vector<std::size_t> chosen;        // grid index chosen per outer fold
    std::vector<double> out_of_fold;        // held-out probability per sample
};

struct NestedCvResult {
    MetricReport report;
    std::vector<RepeatResult> repeats;
};

/// Records one model fit: which rows trained it and which rows it scored.
/// inner_fold is -1 for the outer refit.
struct FitEvent {
    std::size_t repeat;
    std::size_t outer_fold;
    int inner_fold;
    std::size_t grid_index;
    std::span<const std::size_t> train;
    std::span<const std::size_t> evaluate;
};

struct NestedCvOptions {
    /// 0 picks the hardware concurrency.
    std::size_t workers = 1;
    /// Called for every fit, possibly from several threads at once.
    std::function<void(const FitEvent&)> observer;
};

/// Repeated nested cross-validation. Per repeat: outer folds split the rows;
/// within each outer training set, inner folds pick the grid point with the
/// highest mean validation accuracy (ties go to fewer trees, then shallower,
/// then earlier grid entries); the winner is refit on the outer training set
/// and scored on the held-out fold. Repeat metrics are means over outer folds;
/// ranking metrics skip folds whose held-out rows hold a single class.
/// Grid points that differ only in n_trees share one fit and are scored on
/// its tree prefixes, which equals fitting them separately.
NestedCvResult nested_cv(const FeatureTable& table, std::span<const GbdtHyperparams> grid, const CvProtocol& proto,
                         const NestedCvOptions& opts = {});

/// n_trees {100, 300} x max_depth {2, 3, 4} x learning_rate {0.05, 0.1} x subsample {0.8, 1.0}.
std::vector<GbdtHyperparams> default_grid(std::uint64_t seed = 0);

/// Table layout: one line per metric, "mean (max, min)".
std::string format_report(const MetricReport& report, const std::string& title = {});

// --- feature importance ----------------------------------------------------

struct FeatureImportance {
    std::string feature;
    double importance;  // held-out loss without the feature minus with it
};

/// Leave-one-feature-out importance: for each feature, retrain with the same
/// hyperparameters on the table minus that column and compare mean held-out
/// logistic loss over the protocol's outer folds and repeats. Sorted
/// descending; equal importances keep column order.
std::vector<FeatureImportance> feature_importance(const FeatureTable& table, const GbdtHyperparams& hp,
                                                  const CvProtocol& proto, std::size_t workers = 1);

/// Mean held-out logistic loss of plain k-fold CV with fixed hyperparameters.
double cv_log_loss(const FeatureTable& table, const GbdtHyperparams& hp, const CvProtocol& proto);

}  // namespace tbm
