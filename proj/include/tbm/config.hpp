#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tbm/evaluation.hpp"
#include "tbm/gbdt.hpp"
#include "tbm/synthetic.hpp"

namespace tbm {

/// Everything a batch run needs. Loaded from a flat "key = value" file; '#'
/// starts a comment and lists are comma-separated. Unknown keys are errors.
struct RunConfig {
    // clustering
    std::vector<std::size_t> r_values = {5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
    std::size_t feature_r = 0;  // 0 uses the BIC choice
    std::size_t hlloyd_max_iters = 50;
    double hlloyd_tol = 0.0;

    // supervised stage
    CvProtocol cv{};
    std::vector<std::size_t> grid_n_trees = {100, 300};
    std::vector<std::size_t> grid_max_depth = {2, 3, 4};
    std::vector<double> grid_learning_rate = {0.05, 0.1};
    std::vector<double> grid_subsample = {0.8, 1.0};
    std::size_t min_samples_leaf = 1;
    std::size_t importance_folds = 10;
    std::size_t importance_repeats = 1;

    // preprocessing
    bool fisher_transform = false;
    bool zscore = true;
    double symmetry_tol = 1e-6;

    // baselines
    std::size_t pca_components = 10;
    std::filesystem::path atlas_map;  // empty: Brainnetome lobes (p = 246 only)

    // synthetic data for the synth subcommand
    PlantedSpec synth{};
    LabelSpec synth_labels{};

    std::uint64_t seed = 0;
    std::size_t workers = 0;  // 0 picks the hardware concurrency
    std::filesystem::path out_dir = "tbm_out";

    RunConfig() { reseed(0); }

    /// Sets the master seed and the seeds derived from it.
    void reseed(std::uint64_t master);

    /// Throws ConfigError naming the offending key.
    void validate() const;

    /// Cartesian product of the grid lists, seeded from `seed`.
    std::vector<GbdtHyperparams> grid() const;

    /// Canonical text form; parse_config(to_text()) reproduces the config.
    std::string to_text() const;
};

RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Applies the worker-count override from TBM_WORKERS when it is set.
void apply_environment(RunConfig& config);

}  // namespace tbm
