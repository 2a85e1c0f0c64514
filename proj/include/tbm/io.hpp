#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "tbm/clustering.hpp"
#include "tbm/evaluation.hpp"
#include "tbm/features.hpp"
#include "tbm/matrix.hpp"
#include "tbm/membership.hpp"
#include "tbm/tensor.hpp"

namespace tbm {

namespace fs = std::filesystem;

/// Shortest round-trip text for a double ("%.17g").
std::string format_real(double v);

/// Headerless CSV of a square-or-not matrix, one row per line. Empty cells and
/// NA/NaN are read as 0 (missing connectome entries).
DenseMatrix read_matrix_csv(const fs::path& path);
void write_matrix_csv(const fs::path& path, const DenseMatrix& m);

/// Flat "key = value" text. Keys: subjects, covariates, labels; paths are
/// relative to the manifest's directory. The subjects file is CSV with header
/// "subject_id,functional,diffusion" naming one matrix file per modality.
struct SubjectEntry {
    std::string id;
    fs::path functional;
    fs::path diffusion;
};

struct DatasetManifest {
    fs::path root;
    std::vector<SubjectEntry> subjects;
    fs::path covariates;  // CSV: subject_id,age,gender,race,hiv
    fs::path labels;      // CSV: subject_id,label
};

DatasetManifest load_manifest(const fs::path& path);

struct Dataset {
    DenseTensor y;  // (subjects, 2, p, p); modality 0 functional, 1 diffusion
    Covariates covariates;
    std::vector<int> labels;
    std::vector<std::string> subject_ids;
    std::vector<std::string> warnings;
};

/// Reads every subject's matrices into one tensor. Slices asymmetric beyond
/// `symmetry_tol` produce warnings, not errors.
Dataset ingest(const DatasetManifest& manifest, double symmetry_tol = 1e-6);

/// Writes a dataset in the ingest format; returns the manifest path.
fs::path write_dataset(const fs::path& dir, const DenseTensor& y, const Covariates& covariates,
                       const std::vector<int>& labels, const std::vector<std::string>& subject_ids);

/// "roi_index,cluster_id" with one-based ids.
void write_membership(const fs::path& path, const Membership& z);
Membership read_membership(const fs::path& path);

/// Header "subject_id,<feature names...>,label".
void write_feature_table(const fs::path& path, const FeatureTable& table);
FeatureTable read_feature_table(const fs::path& path);

/// Header "r,bic,residual,iterations".
void write_bic_table(const fs::path& path, const ModelSelection& selection);
std::vector<BicRow> read_bic_table(const fs::path& path);

/// Headed CSV held as text cells; cells containing commas are quoted.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    double number(std::size_t row, std::size_t col) const;
    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const fs::path& path);
void write_csv(const fs::path& path, const CsvTable& table);

/// Header "metric,mean,max,min,repeats" at full precision.
void write_metric_report(const fs::path& path, const MetricReport& report);
MetricReport read_metric_report(const fs::path& path);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

/// Splits one CSV line on commas outside double quotes; quotes are dropped.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace tbm
