#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tbm/baselines.hpp"
#include "tbm/clustering.hpp"
#include "tbm/config.hpp"
#include "tbm/evaluation.hpp"
#include "tbm/features.hpp"
#include "tbm/io.hpp"

namespace tbm {

/// atanh with the strict (-1, 1) domain check; throws DataError outside it.
double fisher_z(double r);

/// Optional atanh on the functional modality (index 0), then per-modality
/// z-scoring over every entry of every subject. Zero variance is a DataError.
DenseTensor preprocess(const DenseTensor& y, bool fisher_transform, bool zscore);

/// Loads the manifest and applies preprocessing from the config.
Dataset load_dataset(const std::filesystem::path& manifest, const RunConfig& config);

ModelSelection cluster_stage(const DenseTensor& y, const RunConfig& config);
/// Membership used for features: config.feature_r if set, else the BIC choice.
const BicRow& feature_row(const ModelSelection& selection, const RunConfig& config);

struct TrainOutputs {
    NestedCvResult cv;
    /// Grid point chosen most often across outer folds; used for importance.
    GbdtHyperparams importance_hp;
    std::vector<FeatureImportance> importance;
};

/// Nested CV over the config's grid; importance is computed when asked.
TrainOutputs train_stage(const FeatureTable& table, const RunConfig& config, bool with_importance);

enum class BaselineKind { pca, atlas, raw };
BaselineKind parse_baseline_kind(const std::string& name);
FeatureTable baseline_features(const Dataset& data, BaselineKind kind, const RunConfig& config);

// Artifact writers. Every table here has a reader in io.hpp.
void write_cluster_artifacts(const std::filesystem::path& dir, const ModelSelection& selection);
void write_train_artifacts(const std::filesystem::path& dir, const FeatureTable& table, const TrainOutputs& outputs);

struct PipelineSummary {
    std::size_t best_r = 0;
    std::size_t feature_r = 0;
    MetricReport report;
    std::vector<FeatureImportance> top_features;  // at most five
    std::vector<std::string> warnings;
};

/// ingest -> preprocess -> cluster -> features -> train -> importance -> report.
/// An INCOMPLETE marker holds the failing stage's message until the run
/// finishes; errors are rethrown with a "[stage]" prefix and their type kept.
PipelineSummary run_pipeline(const RunConfig& config, const std::filesystem::path& manifest,
                             const std::filesystem::path& out_dir, std::ostream* log = nullptr);

/// Wraps a stage so any library error carries the stage name.
template <class Fn>
decltype(auto) run_stage(const char* stage, Fn&& fn);

std::string tag_stage(const char* stage, const char* message);

}  // namespace tbm

#include "tbm/error.hpp"

template <class Fn>
decltype(auto) tbm::run_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw ConfigError(tag_stage(stage, e.what()));
    } catch (const ArgumentError& e) {
        throw ArgumentError(tag_stage(stage, e.what()));
    } catch (const DataError& e) {
        throw DataError(tag_stage(stage, e.what()));
    } catch (const ProtocolError& e) {
        throw ProtocolError(tag_stage(stage, e.what()));
    } catch (const MetricError& e) {
        throw MetricError(tag_stage(stage, e.what()));
    }
}
