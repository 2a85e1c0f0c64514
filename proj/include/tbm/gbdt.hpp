#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "tbm/features.hpp"
#include "tbm/matrix.hpp"

namespace tbm {

struct GbdtHyperparams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 3;
    double learning_rate = 0.1;
    double subsample = 1.0;
    std::size_t min_samples_leaf = 1;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const GbdtHyperparams&) const = default;
};

/// L2 damping on leaf Newton steps and split gains.
inline constexpr double kLeafL2 = 1.0;

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;  // rows with x <= threshold go left
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    double value = 0.0;  // leaf output

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(const DenseMatrix& x, std::size_t row) const;
    bool operator==(const RegressionTree&) const = default;
};

struct GbdtModel {
    std::size_t n_features = 0;
    double base_score = 0.0;  // log-odds of the training prevalence
    double learning_rate = 0.1;
    std::vector<RegressionTree> trees;

    bool operator==(const GbdtModel&) const = default;
};

/// Stagewise logistic-loss boosting. Each stage fits one depth-limited tree to
/// the gradient/hessian of the loss on a seeded row subsample, with
/// second-order split gains and damped Newton leaf values.
GbdtModel fit(const FeatureTable& table, const GbdtHyperparams& hp);
GbdtModel fit(const DenseMatrix& x, std::span<const int> labels, const GbdtHyperparams& hp);

/// sigmoid(base_score + lr * sum of tree outputs), using the first `n_trees`
/// trees when given. Outputs lie strictly inside (0, 1).
std::vector<double> predict_proba(const GbdtModel& m, const DenseMatrix& rows);
std::vector<double> predict_proba(const GbdtModel& m, const DenseMatrix& rows, std::size_t n_trees);

/// Mean logistic loss of probabilities against binary labels.
double log_loss(std::span<const int> labels, std::span<const double> probabilities);

/// Plain-text model format, version 1:
///
///   tbm-gbdt 1
///   n_features <d>
///   learning_rate <lr>
///   base_score <b>
///   trees <T>
///   tree <k> <node count>
///   <node id> split <feature> <threshold> <left> <right>
///   <node id> leaf <value>
///   ...
///   end
///
/// Reals are written with 17 significant digits so a reload is bit-exact.
void save_model(std::ostream& out, const GbdtModel& m);
GbdtModel load_model(std::istream& in);

}  // namespace tbm
