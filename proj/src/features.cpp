#include "tbm/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "block_stats.hpp"
#include "tbm/error.hpp"

namespace tbm {
namespace {

std::string lowercase(std::string s) {
    std::ranges::transform(s, s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    auto begin = s.find_first_not_of(" \t\r\"");
    auto end = s.find_last_not_of(" \t\r\"");
    return begin == std::string::npos ? std::string{} : s.substr(begin, end - begin + 1);
}

// Numeric 0/1 codes pass through; anything else is matched as text.
bool as_binary_code(const std::string& v, double& out) {
    if (v == "0" || v == "1") {
        out = v == "1" ? 1.0 : 0.0;
        return true;
    }
    return false;
}

}  // namespace

CoreTensor block_means(const DenseTensor& y, const Membership& z) {
    require_connectome_shape(y, "block_means");
    if (z.size() != y.dim(2)) throw ArgumentError("block_means: membership length differs from ROI count");
    bool empty = false;
    DenseTensor means = detail::block_means_tolerant(y, z, &empty);
    if (empty) throw ArgumentError("block_means: membership has an empty cluster");
    return CoreTensor(std::move(means));
}

std::vector<double> flatten_upper(const DenseMatrix& m) {
    if (m.rows() != m.cols()) throw ArgumentError("flatten_upper: matrix is not square");
    std::vector<double> out;
    out.reserve(upper_count(m.rows()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j) out.push_back(m(i, j));
    return out;
}

DenseMatrix unflatten_upper(std::span<const double> values) {
    std::size_t r = 0;
    while (upper_count(r) < values.size()) ++r;
    if (upper_count(r) != values.size()) throw ArgumentError("unflatten_upper: length is not triangular");
    DenseMatrix m(r, r);
    std::size_t k = 0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i; j < r; ++j) m(i, j) = m(j, i) = values[k++];
    return m;
}

const std::vector<std::string>& Covariates::names() {
    static const std::vector<std::string> kNames = {"age", "gender", "race", "hiv"};
    return kNames;
}

double Covariates::value(std::size_t subject, std::size_t which) const {
    switch (which) {
        case 0: return age.at(subject);
        case 1: return gender.at(subject);
        case 2: return race.at(subject);
        case 3: return hiv.at(subject);
        default: throw ArgumentError("Covariates::value: index out of range");
    }
}

double encode_gender(const std::string& value) {
    double code;
    if (as_binary_code(value, code)) return code;
    const auto v = lowercase(value);
    if (v == "male" || v == "m") return 1.0;
    if (v == "female" || v == "f") return 0.0;
    throw DataError("unrecognized gender value '" + value + "'");
}

double encode_race(const std::string& value) {
    double code;
    if (as_binary_code(value, code)) return code;
    const auto v = lowercase(value);
    if (v.empty()) throw DataError("missing race value");
    return (v == "black" || v == "african american" || v == "black/african american") ? 1.0 : 0.0;
}

double encode_hiv(const std::string& value) {
    double code;
    if (as_binary_code(value, code)) return code;
    const auto v = lowercase(value);
    if (v == "positive" || v == "yes" || v == "pos" || v == "+") return 1.0;
    if (v == "negative" || v == "no" || v == "neg" || v == "-") return 0.0;
    throw DataError("unrecognized HIV status '" + value + "'");
}

FeatureTable::FeatureTable(std::vector<std::string> names, DenseMatrix values, std::vector<int> labels,
                           std::vector<std::string> subject_ids)
    : names_(std::move(names)), values_(std::move(values)), labels_(std::move(labels)),
      subject_ids_(std::move(subject_ids)) {
    if (names_.size() != values_.cols()) throw DataError("FeatureTable: name count differs from column count");
    if (labels_.size() != values_.rows()) {
        throw DataError("FeatureTable: " + std::to_string(labels_.size()) + " labels for " +
                        std::to_string(values_.rows()) + " rows");
    }
    if (!subject_ids_.empty() && subject_ids_.size() != values_.rows()) {
        throw DataError("FeatureTable: subject id count differs from row count");
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] != 0 && labels_[i] != 1) {
            throw DataError("FeatureTable: label of row " + std::to_string(i + 1) + " is not binary");
        }
    }
    for (double v : values_.data())
        if (!std::isfinite(v)) throw DataError("FeatureTable: missing or non-finite feature value");
}

std::size_t FeatureTable::index_of(const std::string& name) const {
    auto it = std::ranges::find(names_, name);
    if (it == names_.end()) throw ArgumentError("FeatureTable: no feature named " + name);
    return static_cast<std::size_t>(it - names_.begin());
}

FeatureTable FeatureTable::select_rows(std::span<const std::size_t> rows) const {
    std::vector<int> labels(rows.size());
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        labels[i] = labels_[rows[i]];
        if (!subject_ids_.empty()) ids.push_back(subject_ids_[rows[i]]);
    }
    return FeatureTable(names_, tbm::select_rows(values_, rows), std::move(labels), std::move(ids));
}

FeatureTable FeatureTable::without_feature(std::size_t feature) const {
    std::vector<std::size_t> keep;
    std::vector<std::string> names;
    for (std::size_t j = 0; j < n_features(); ++j) {
        if (j == feature) continue;
        keep.push_back(j);
        names.push_back(names_[j]);
    }
    return FeatureTable(std::move(names), select_cols(values_, keep), labels_, subject_ids_);
}

FeatureTable FeatureTable::with_labels(std::vector<int> labels) const {
    return FeatureTable(names_, values_, std::move(labels), subject_ids_);
}

std::string feature_name(const std::string& prefix, std::size_t i, std::size_t j) {
    return prefix + "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

FeatureTable combine_with_covariates(std::vector<std::string> names, const DenseMatrix& connectome_features,
                                     const Covariates& covariates, const std::vector<int>& labels,
                                     const std::vector<std::string>& subject_ids) {
    const std::size_t n = connectome_features.rows();
    if (covariates.size() != n || covariates.gender.size() != n || covariates.race.size() != n ||
        covariates.hiv.size() != n) {
        throw DataError("assemble_features: covariates have " + std::to_string(covariates.size()) + " rows for " +
                        std::to_string(n) + " subjects");
    }
    if (labels.size() != n) {
        throw DataError("assemble_features: " + std::to_string(labels.size()) + " labels for " + std::to_string(n) +
                        " subjects");
    }
    const std::size_t base = connectome_features.cols();
    const std::size_t n_cov = Covariates::names().size();
    DenseMatrix values(n, base + n_cov);
    for (std::size_t j = 0; j < base; ++j) std::ranges::copy(connectome_features.col(j), values.col(j).begin());
    for (std::size_t c = 0; c < n_cov; ++c)
        for (std::size_t i = 0; i < n; ++i) values(i, base + c) = covariates.value(i, c);
    for (const auto& name : Covariates::names()) names.push_back(name);
    return FeatureTable(std::move(names), std::move(values), labels, subject_ids);
}

FeatureTable assemble_features(const DenseTensor& y, const Membership& z, const Covariates& covariates,
                               const std::vector<int>& labels, const std::vector<std::string>& subject_ids,
                               const std::vector<std::string>& prefixes) {
    const CoreTensor core = block_means(y, z);
    const std::size_t n = core.n_subjects();
    const std::size_t m = core.n_modalities();
    if (prefixes.size() != m) {
        throw ArgumentError("assemble_features: " + std::to_string(prefixes.size()) + " modality prefixes for " +
                            std::to_string(m) + " modalities");
    }
    const std::size_t r = core.r();
    const std::size_t per = upper_count(r);
    DenseMatrix block(n, m * per);
    std::vector<std::string> names;
    for (std::size_t mod = 0; mod < m; ++mod)
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = a; b < r; ++b) names.push_back(feature_name(prefixes[mod], a + 1, b + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t mod = 0; mod < m; ++mod) {
            const auto flat = flatten_upper(core.slice(i, mod));
            for (std::size_t k = 0; k < per; ++k) block(i, mod * per + k) = flat[k];
        }
    }
    return combine_with_covariates(std::move(names), block, covariates, labels, subject_ids);
}

}  // namespace tbm
