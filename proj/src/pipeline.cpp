#include "tbm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "tbm/random.hpp"

namespace tbm {
namespace {

void note(std::ostream* log, const std::string& msg) {
    if (log) *log << msg << '\n' << std::flush;
}

std::string joined(const std::vector<std::string>& lines) {
    std::string s;
    for (const auto& l : lines) s += l + "\n";
    return s;
}

}  // namespace

std::string tag_stage(const char* stage, const char* message) {
    const std::string m = message;
    if (m.rfind("[", 0) == 0) return m;  // already tagged by an inner stage
    return std::string("[") + stage + "] " + m;
}

double fisher_z(double r) {
    if (!(r > -1.0 && r < 1.0)) {
        throw DataError("fisher transform needs functional entries in (-1, 1), found " + format_real(r));
    }
    return std::atanh(r);
}

DenseTensor preprocess(const DenseTensor& y, bool fisher_transform, bool zscore) {
    require_connectome_shape(y, "preprocess");
    DenseTensor out = y;
    const std::size_t n = y.dim(0), m = y.dim(1), p = y.dim(2);
    if (fisher_transform) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t b = 0; b < p; ++b)
                for (std::size_t a = 0; a < p; ++a) out(i, 0, a, b) = fisher_z(y(i, 0, a, b));
    }
    if (!zscore) return out;
    const double count = static_cast<double>(n * p * p);
    for (std::size_t k = 0; k < m; ++k) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t b = 0; b < p; ++b)
                for (std::size_t a = 0; a < p; ++a) mean += out(i, k, a, b);
        mean /= count;
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t b = 0; b < p; ++b)
                for (std::size_t a = 0; a < p; ++a) {
                    const double d = out(i, k, a, b) - mean;
                    var += d * d;
                }
        var /= count;
        if (!(var > 0.0) || !std::isfinite(var)) {
            throw DataError("modality " + std::to_string(k) + " has zero variance; cannot standardize");
        }
        const double sd = std::sqrt(var);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t b = 0; b < p; ++b)
                for (std::size_t a = 0; a < p; ++a) out(i, k, a, b) = (out(i, k, a, b) - mean) / sd;
    }
    return out;
}

Dataset load_dataset(const std::filesystem::path& manifest, const RunConfig& config) {
    Dataset d = run_stage("ingest", [&] { return ingest(load_manifest(manifest), config.symmetry_tol); });
    d.y = run_stage("preprocess", [&] { return preprocess(d.y, config.fisher_transform, config.zscore); });
    return d;
}

ModelSelection cluster_stage(const DenseTensor& y, const RunConfig& config) {
    return run_stage("cluster", [&] {
        for (auto r : config.r_values) {
            if (r > y.dim(2)) {
                throw ConfigError("r = " + std::to_string(r) + " exceeds the ROI count " + std::to_string(y.dim(2)));
            }
        }
        SelectOptions opts;
        opts.hlloyd_max_iters = config.hlloyd_max_iters;
        opts.hlloyd_tol = config.hlloyd_tol;
        opts.workers = config.workers;
        return select_r(y, config.r_values, derive_seed(config.seed, {1}), opts);
    });
}

const BicRow& feature_row(const ModelSelection& selection, const RunConfig& config) {
    const std::size_t r = config.feature_r == 0 ? selection.best_r : config.feature_r;
    for (const auto& row : selection.table)
        if (row.r == r) return row;
    throw ConfigError("feature_r = " + std::to_string(r) + " is not among the clustered r values");
}

TrainOutputs train_stage(const FeatureTable& table, const RunConfig& config, bool with_importance) {
    TrainOutputs out;
    const auto grid = config.grid();
    out.cv = run_stage("train", [&] {
        NestedCvOptions opts;
        opts.workers = config.workers;
        return nested_cv(table, grid, config.cv, opts);
    });

    std::vector<std::size_t> votes(grid.size(), 0);
    for (const auto& rep : out.cv.repeats)
        for (auto g : rep.chosen) ++votes[g];
    const auto best = static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    out.importance_hp = grid[best];

    if (with_importance) {
        out.importance = run_stage("importance", [&] {
            CvProtocol proto = config.cv;
            proto.outer_folds = config.importance_folds;
            proto.n_repeats = config.importance_repeats;
            proto.seed = derive_seed(config.seed, {4});
            return feature_importance(table, out.importance_hp, proto, config.workers);
        });
    }
    return out;
}

BaselineKind parse_baseline_kind(const std::string& name) {
    if (name == "pca") return BaselineKind::pca;
    if (name == "atlas") return BaselineKind::atlas;
    if (name == "raw") return BaselineKind::raw;
    throw ConfigError("unknown baseline '" + name + "' (expected pca, atlas, or raw)");
}

FeatureTable baseline_features(const Dataset& data, BaselineKind kind, const RunConfig& config) {
    return run_stage("features", [&] {
        switch (kind) {
            case BaselineKind::pca:
                return pca_features(data.y, config.pca_components, data.covariates, data.labels, data.subject_ids);
            case BaselineKind::atlas: {
                AtlasClusterMap atlas;
                const std::size_t p = data.y.dim(2);
                if (!config.atlas_map.empty()) {
                    std::istringstream in(read_text(config.atlas_map));
                    atlas = AtlasClusterMap::read(in, p);
                } else if (p == 246) {
                    atlas = AtlasClusterMap::brainnetome_lobes();
                } else {
                    throw ConfigError("atlas_map is required when the data do not have 246 ROIs");
                }
                return atlas_features(data.y, atlas, data.covariates, data.labels, data.subject_ids);
            }
            case BaselineKind::raw:
                return raw_features(data.y, data.covariates, data.labels, data.subject_ids);
        }
        throw ArgumentError("unhandled baseline kind");
    });
}

void write_cluster_artifacts(const std::filesystem::path& dir, const ModelSelection& selection) {
    write_bic_table(dir / "bic.csv", selection);
    for (const auto& row : selection.table) {
        write_membership(dir / ("membership_r" + std::to_string(row.r) + ".csv"), row.membership);
    }
}

void write_train_artifacts(const std::filesystem::path& dir, const FeatureTable& table, const TrainOutputs& outputs) {
    const auto& cv = outputs.cv;
    write_text(dir / "metrics.txt", format_report(cv.report, "nested cross-validation"));
    write_metric_report(dir / "metrics.csv", cv.report);

    CsvTable repeats;
    repeats.header = {"repeat", "accuracy", "auroc", "auprc", "min_re_p"};
    for (std::size_t k = 0; k < cv.repeats.size(); ++k) {
        const auto& m = cv.repeats[k].mean;
        repeats.rows.push_back({std::to_string(k + 1), format_real(m.accuracy), format_real(m.auroc),
                                format_real(m.auprc), format_real(m.min_re_p)});
    }
    write_csv(dir / "metrics_repeats.csv", repeats);

    // Curves pool the first repeat's out-of-fold probabilities.
    if (!cv.repeats.empty()) {
        const auto& probs = cv.repeats.front().out_of_fold;
        CsvTable roc;
        roc.header = {"threshold", "false_positive_rate", "true_positive_rate"};
        for (const auto& pt : roc_curve(table.labels(), probs)) {
            roc.rows.push_back({format_real(pt.threshold), format_real(pt.false_positive_rate),
                                format_real(pt.true_positive_rate)});
        }
        write_csv(dir / "roc_curve.csv", roc);
        CsvTable pr;
        pr.header = {"threshold", "precision", "recall"};
        for (const auto& pt : pr_curve(table.labels(), probs)) {
            pr.rows.push_back({format_real(pt.threshold), format_real(pt.precision), format_real(pt.recall)});
        }
        write_csv(dir / "pr_curve.csv", pr);
    }

    const auto& hp = outputs.importance_hp;
    CsvTable hp_table;
    hp_table.header = {"n_trees", "max_depth", "learning_rate", "subsample", "min_samples_leaf"};
    hp_table.rows.push_back({std::to_string(hp.n_trees), std::to_string(hp.max_depth), format_real(hp.learning_rate),
                             format_real(hp.subsample), std::to_string(hp.min_samples_leaf)});
    write_csv(dir / "selected_hyperparams.csv", hp_table);

    if (outputs.importance.empty()) return;
    CsvTable imp;
    imp.header = {"rank", "feature", "importance"};
    for (std::size_t k = 0; k < outputs.importance.size(); ++k) {
        imp.rows.push_back(
            {std::to_string(k + 1), outputs.importance[k].feature, format_real(outputs.importance[k].importance)});
    }
    write_csv(dir / "importance.csv", imp);

    // One symmetric r x r grid per modality, for block heatmaps.
    std::map<std::string, double> by_name;
    for (const auto& f : outputs.importance) by_name[f.feature] = f.importance;
    std::size_t r = 0;
    while (by_name.contains(feature_name(kModalityPrefixes.front(), r + 1, r + 1))) ++r;
    if (r == 0) return;
    for (const auto& prefix : kModalityPrefixes) {
        DenseMatrix heat(r, r);
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = a; b < r; ++b) {
                const auto it = by_name.find(feature_name(prefix, a + 1, b + 1));
                const double v = it == by_name.end() ? 0.0 : it->second;
                heat(a, b) = v;
                heat(b, a) = v;
            }
        write_matrix_csv(dir / ("importance_heatmap_" + prefix + ".csv"), heat);
    }
}

PipelineSummary run_pipeline(const RunConfig& config, const std::filesystem::path& manifest,
                             const std::filesystem::path& out_dir, std::ostream* log) {
    config.validate();
    std::filesystem::create_directories(out_dir);
    const auto marker = out_dir / "INCOMPLETE";
    write_text(marker, "run in progress\n");
    PipelineSummary summary;
    try {
        write_text(out_dir / "run_config.txt", config.to_text());

        note(log, "ingest: reading " + manifest.string());
        const Dataset data = load_dataset(manifest, config);
        summary.warnings = data.warnings;
        for (const auto& w : data.warnings) note(log, "warning: " + w);
        write_text(out_dir / "ingest_warnings.txt", joined(data.warnings));

        note(log, "cluster: " + std::to_string(config.r_values.size()) + " candidate r values");
        const ModelSelection selection = cluster_stage(data.y, config);
        write_cluster_artifacts(out_dir, selection);
        summary.best_r = selection.best_r;

        const BicRow& row = run_stage("features", [&]() -> const BicRow& { return feature_row(selection, config); });
        summary.feature_r = row.r;
        note(log, "features: r = " + std::to_string(row.r) + " (BIC choice " + std::to_string(selection.best_r) + ")");
        const FeatureTable table = run_stage("features", [&] {
            return assemble_features(data.y, row.membership, data.covariates, data.labels, data.subject_ids);
        });
        write_feature_table(out_dir / "features.csv", table);

        note(log, "train: " + std::to_string(config.cv.n_repeats) + " repeats of nested cross-validation");
        const TrainOutputs trained = train_stage(table, config, true);
        write_train_artifacts(out_dir, table, trained);
        summary.report = trained.cv.report;
        summary.top_features.assign(trained.importance.begin(),
                                    trained.importance.begin() + std::min<std::size_t>(5, trained.importance.size()));

        std::string text = "selected r (BIC): " + std::to_string(summary.best_r) + "\n";
        text += "feature r: " + std::to_string(summary.feature_r) + "\n\n";
        text += format_report(summary.report, "nested cross-validation");
        text += "\ntop features (leave-one-out logistic loss increase)\n";
        for (std::size_t k = 0; k < summary.top_features.size(); ++k) {
            text += std::to_string(k + 1) + ". " + summary.top_features[k].feature + " " +
                    format_real(summary.top_features[k].importance) + "\n";
        }
        write_text(out_dir / "summary.txt", text);
    } catch (const std::exception& e) {
        write_text(marker, std::string(e.what()) + "\n");
        throw;
    }
    std::filesystem::remove(marker);
    note(log, "done: artifacts in " + out_dir.string());
    return summary;
}

}  // namespace tbm
