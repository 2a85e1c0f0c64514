#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tbm/matrix.hpp"
#include "tbm/membership.hpp"
#include "tbm/tensor.hpp"

namespace tbm {

/// Mean of y[i1, i2, j3, j4] over j3 in cluster a and j4 in cluster b, for
/// every subject and modality. Throws ArgumentError if a cluster is empty.
CoreTensor block_means(const DenseTensor& y, const Membership& z);

/// Upper triangle including the diagonal, row by row:
/// (1,1), (1,2), ..., (1,r), (2,2), ..., (r,r).
std::vector<double> flatten_upper(const DenseMatrix& m);
/// Rebuilds the symmetric matrix from flatten_upper output.
DenseMatrix unflatten_upper(std::span<const double> values);

constexpr std::size_t upper_count(std::size_t r) { return r * (r + 1) / 2; }

/// Participant characteristics, one entry per subject.
struct Covariates {
    std::vector<double> age;     // years
    std::vector<double> gender;  // 1 = male
    std::vector<double> race;    // 1 = Black/African American
    std::vector<double> hiv;     // 1 = HIV positive

    static const std::vector<std::string>& names();
    std::size_t size() const { return age.size(); }
    double value(std::size_t subject, std::size_t which) const;
};

double encode_gender(const std::string& value);
double encode_race(const std::string& value);
double encode_hiv(const std::string& value);

/// Per-subject feature rows with binary labels (1 = case).
class FeatureTable {
public:
    FeatureTable() = default;
    FeatureTable(std::vector<std::string> names, DenseMatrix values, std::vector<int> labels,
                 std::vector<std::string> subject_ids = {});

    std::size_t n_rows() const { return values_.rows(); }
    std::size_t n_features() const { return values_.cols(); }
    const std::vector<std::string>& names() const { return names_; }
    const DenseMatrix& values() const { return values_; }
    const std::vector<int>& labels() const { return labels_; }
    const std::vector<std::string>& subject_ids() const { return subject_ids_; }

    double value(std::size_t row, std::size_t feature) const { return values_(row, feature); }
    std::size_t index_of(const std::string& name) const;

    FeatureTable select_rows(std::span<const std::size_t> rows) const;
    FeatureTable without_feature(std::size_t feature) const;
    FeatureTable with_labels(std::vector<int> labels) const;

    bool operator==(const FeatureTable&) const = default;

private:
    std::vector<std::string> names_;
    DenseMatrix values_;
    std::vector<int> labels_;
    std::vector<std::string> subject_ids_;
};

/// Column names "fun(i,j)" and "str(i,j)" name the two modalities.
inline const std::vector<std::string> kModalityPrefixes = {"fun", "str"};

/// Block-mean features per modality followed by the four covariates.
/// Column count is n_modalities * r(r+1)/2 + 4.
FeatureTable assemble_features(const DenseTensor& y, const Membership& z, const Covariates& covariates,
                               const std::vector<int>& labels, const std::vector<std::string>& subject_ids = {},
                               const std::vector<std::string>& prefixes = kModalityPrefixes);

/// Appends covariate columns to a connectome feature block.
FeatureTable combine_with_covariates(std::vector<std::string> names, const DenseMatrix& connectome_features,
                                     const Covariates& covariates, const std::vector<int>& labels,
                                     const std::vector<std::string>& subject_ids);

std::string feature_name(const std::string& prefix, std::size_t i, std::size_t j);

}  // namespace tbm
