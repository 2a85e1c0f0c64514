// Command-line entry point: tbm <subcommand> [options].

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "tbm/error.hpp"
#include "tbm/io.hpp"
#include "tbm/pipeline.hpp"
#include "tbm/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kConfig = 2, kData = 3, kInternal = 4 };

struct Common {
    std::string config;
    std::string manifest;
    std::optional<std::uint64_t> seed;
    std::string out;
};

tbm::RunConfig resolve(const Common& c) {
    tbm::RunConfig cfg = c.config.empty() ? tbm::RunConfig{} : tbm::load_config(c.config);
    if (c.seed) cfg.reseed(*c.seed);
    if (!c.out.empty()) cfg.out_dir = c.out;
    tbm::apply_environment(cfg);
    cfg.validate();
    return cfg;
}

void require(const std::string& value, const char* flag) {
    if (value.empty()) throw tbm::ConfigError(std::string(flag) + " is required");
}

void add_common(CLI::App* sub, Common& c, bool manifest) {
    sub->add_option("--config", c.config, "flat key = value run configuration");
    if (manifest) sub->add_option("--manifest", c.manifest, "dataset manifest");
    sub->add_option("--seed", c.seed, "master seed (overrides the config)");
    sub->add_option("--out", c.out, "output directory");
}

int synth(const Common& c) {
    const auto cfg = resolve(c);
    const auto data = tbm::generate_labeled(cfg.synth, cfg.synth_labels);
    fs::create_directories(cfg.out_dir);
    const auto manifest = tbm::write_dataset(cfg.out_dir, data.planted.y, data.covariates, data.labels, data.subject_ids);
    tbm::write_membership(cfg.out_dir / "planted_membership.csv", data.planted.truth);
    std::cout << manifest.string() << '\n';
    return kOk;
}

int ingest_check(const Common& c) {
    require(c.manifest, "--manifest");
    const auto cfg = resolve(c);
    const auto data = tbm::run_stage("ingest", [&] { return tbm::ingest(tbm::load_manifest(c.manifest), cfg.symmetry_tol); });
    for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';
    std::size_t positives = 0;
    for (int l : data.labels) positives += l == 1;
    std::cout << "subjects " << data.y.dim(0) << "\nmodalities " << data.y.dim(1) << "\nrois " << data.y.dim(2)
              << "\npositives " << positives << "\nwarnings " << data.warnings.size() << '\n';
    return kOk;
}

int cluster(const Common& c) {
    require(c.manifest, "--manifest");
    const auto cfg = resolve(c);
    const auto data = tbm::load_dataset(c.manifest, cfg);
    const auto selection = tbm::cluster_stage(data.y, cfg);
    fs::create_directories(cfg.out_dir);
    tbm::write_cluster_artifacts(cfg.out_dir, selection);
    std::cout << "selected r " << selection.best_r << '\n';
    return kOk;
}

int features(const Common& c, const std::string& membership) {
    require(c.manifest, "--manifest");
    const auto cfg = resolve(c);
    const auto data = tbm::load_dataset(c.manifest, cfg);
    tbm::Membership z;
    if (!membership.empty()) {
        z = tbm::run_stage("features", [&] { return tbm::read_membership(membership); });
    } else {
        const auto selection = tbm::cluster_stage(data.y, cfg);
        z = tbm::feature_row(selection, cfg).membership;
    }
    const auto table = tbm::run_stage("features", [&] {
        return tbm::assemble_features(data.y, z, data.covariates, data.labels, data.subject_ids);
    });
    fs::create_directories(cfg.out_dir);
    tbm::write_feature_table(cfg.out_dir / "features.csv", table);
    std::cout << "features " << table.n_features() << '\n';
    return kOk;
}

int train(const Common& c, const std::string& features_path, bool importance) {
    require(features_path, "--features");
    const auto cfg = resolve(c);
    const auto table = tbm::run_stage("features", [&] { return tbm::read_feature_table(features_path); });
    const auto out = tbm::train_stage(table, cfg, importance);
    fs::create_directories(cfg.out_dir);
    tbm::write_train_artifacts(cfg.out_dir, table, out);
    std::cout << tbm::format_report(out.cv.report);
    return kOk;
}

int baseline(const Common& c, const std::string& kind) {
    require(c.manifest, "--manifest");
    const auto cfg = resolve(c);
    const auto which = tbm::parse_baseline_kind(kind);
    const auto data = tbm::load_dataset(c.manifest, cfg);
    const auto table = tbm::baseline_features(data, which, cfg);
    const auto out = tbm::train_stage(table, cfg, false);
    fs::create_directories(cfg.out_dir);
    tbm::write_feature_table(cfg.out_dir / "features.csv", table);
    tbm::write_train_artifacts(cfg.out_dir, table, out);
    std::cout << tbm::format_report(out.cv.report, kind + " baseline");
    return kOk;
}

int pipeline(const Common& c) {
    require(c.manifest, "--manifest");
    const auto cfg = resolve(c);
    const auto summary = tbm::run_pipeline(cfg, c.manifest, cfg.out_dir, &std::cerr);
    std::cout << "selected r " << summary.best_r << '\n' << tbm::format_report(summary.report);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tensor block-model clustering and classification of connectomes"};
    app.require_subcommand(1);
    Common common;
    std::string membership, features_path, kind;
    bool no_importance = false;

    auto* s_synth = app.add_subcommand("synth", "write a planted synthetic dataset");
    add_common(s_synth, common, false);
    auto* s_ingest = app.add_subcommand("ingest-check", "validate a dataset manifest");
    add_common(s_ingest, common, true);
    auto* s_cluster = app.add_subcommand("cluster", "select r by BIC and write memberships");
    add_common(s_cluster, common, true);
    auto* s_features = app.add_subcommand("features", "assemble block-mean features");
    add_common(s_features, common, true);
    s_features->add_option("--membership", membership, "membership file (default: cluster first)");
    auto* s_train = app.add_subcommand("train", "nested cross-validation on a feature table");
    add_common(s_train, common, false);
    s_train->add_option("--features", features_path, "feature table CSV");
    s_train->add_flag("--no-importance", no_importance, "skip leave-one-feature-out importance");
    auto* s_baseline = app.add_subcommand("baseline", "comparison pipelines");
    add_common(s_baseline, common, true);
    s_baseline->add_option("kind", kind, "pca, atlas, or raw")->required()->check(CLI::IsMember({"pca", "atlas", "raw"}));
    auto* s_pipeline = app.add_subcommand("pipeline", "full run from manifest to report");
    add_common(s_pipeline, common, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (s_synth->parsed()) return synth(common);
        if (s_ingest->parsed()) return ingest_check(common);
        if (s_cluster->parsed()) return cluster(common);
        if (s_features->parsed()) return features(common, membership);
        if (s_train->parsed()) return train(common, features_path, !no_importance);
        if (s_baseline->parsed()) return baseline(common, kind);
        if (s_pipeline->parsed()) return pipeline(common);
    } catch (const tbm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const tbm::ArgumentError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const tbm::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const tbm::ProtocolError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const tbm::MetricError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kInternal;
}
