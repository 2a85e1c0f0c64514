#include <algorithm>
#include <string>

#include "tbm/error.hpp"
#include "tbm/evaluation.hpp"
#include "tbm/parallel.hpp"
#include "tbm/random.hpp"

namespace tbm {

double cv_log_loss(const FeatureTable& table, const GbdtHyperparams& hp, const CvProtocol& proto) {
    if (proto.outer_folds < 2 || proto.n_repeats == 0) throw ArgumentError("cv_log_loss: invalid protocol");
    const auto& labels = table.labels();
    const DenseMatrix& x = table.values();
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t rep = 0; rep < proto.n_repeats; ++rep) {
        const auto fold_of = make_folds(labels, proto.outer_folds, proto.stratified, derive_seed(proto.seed, {rep}));
        for (std::size_t f = 0; f < proto.outer_folds; ++f) {
            std::vector<std::size_t> train, test;
            for (std::size_t i = 0; i < labels.size(); ++i) (fold_of[i] == f ? test : train).push_back(i);
            std::vector<int> train_y, test_y;
            for (auto i : train) train_y.push_back(labels[i]);
            for (auto i : test) test_y.push_back(labels[i]);
            const bool has_both = std::ranges::count(train_y, 1) > 0 && std::ranges::count(train_y, 0) > 0;
            if (!has_both) {
                throw ProtocolError("cv_log_loss: training split of repeat " + std::to_string(rep + 1) + ", fold " +
                                    std::to_string(f + 1) + " has a single class");
            }
            GbdtHyperparams fold_hp = hp;
            fold_hp.seed = derive_seed(hp.seed, {rep, f});
            const GbdtModel model = fit(select_rows(x, train), train_y, fold_hp);
            const auto probs = predict_proba(model, select_rows(x, test));
            total += log_loss(test_y, probs) * static_cast<double>(test.size());
            count += test.size();
        }
    }
    return total / static_cast<double>(count);
}

std::vector<FeatureImportance> feature_importance(const FeatureTable& table, const GbdtHyperparams& hp,
                                                  const CvProtocol& proto, std::size_t workers) {
    hp.validate();
    const double full = cv_log_loss(table, hp, proto);
    std::vector<FeatureImportance> out(table.n_features());
    parallel_for(table.n_features(), workers, [&](std::size_t f) {
        const double reduced = cv_log_loss(table.without_feature(f), hp, proto);
        out[f] = {table.names()[f], reduced - full};
    });
    std::ranges::stable_sort(out, [](const FeatureImportance& a, const FeatureImportance& b) {
        return a.importance > b.importance;
    });
    return out;
}

}  // namespace tbm
