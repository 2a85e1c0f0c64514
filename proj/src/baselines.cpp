#include "tbm/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "tbm/error.hpp"
#include "tbm/linalg.hpp"

namespace tbm {

ConnectomeVectors vectorize_upper(const DenseTensor& y, const std::vector<std::string>& prefixes) {
    require_connectome_shape(y, "vectorize_upper");
    const std::size_t n = y.dim(0), m = y.dim(1), p = y.dim(2);
    if (prefixes.size() != m) throw ArgumentError("vectorize_upper: one prefix per modality is required");
    const std::size_t per = upper_count(p);
    ConnectomeVectors out{DenseMatrix(n, m * per), {}};
    out.names.reserve(m * per);
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = a; b < p; ++b) out.names.push_back(feature_name(prefixes[k], a + 1, b + 1));
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t col = k * per;
        for (std::size_t a = 0; a < p; ++a) {
            for (std::size_t b = a; b < p; ++b, ++col) {
                auto c = out.values.col(col);
                for (std::size_t i = 0; i < n; ++i) c[i] = y(i, k, a, b);
            }
        }
    }
    return out;
}

PcaResult pca(const DenseMatrix& x, std::size_t k) {
    const std::size_t n = x.rows(), p = x.cols();
    if (k == 0 || k > std::min(n, p)) {
        throw ArgumentError("pca: k = " + std::to_string(k) + " must be in [1, " + std::to_string(std::min(n, p)) + "]");
    }
    PcaResult out;
    out.column_means.resize(p);
    DenseMatrix centred = x;
    for (std::size_t j = 0; j < p; ++j) {
        auto c = centred.col(j);
        double mean = 0.0;
        for (double v : c) mean += v;
        mean /= static_cast<double>(n);
        for (double& v : c) v -= mean;
        out.column_means[j] = mean;
    }
    // Left singular vectors U of the centred data; scores = U * Sigma.
    const SingularSubspace left = leading_eigenspace(gram_rows(centred), k);
    out.scores = DenseMatrix(n, k);
    out.explained_variance.resize(k);
    const double dof = n > 1 ? static_cast<double>(n - 1) : 1.0;
    for (std::size_t c = 0; c < k; ++c) {
        const double sigma = left.singular_values[c];
        for (std::size_t i = 0; i < n; ++i) out.scores(i, c) = left.basis(i, c) * sigma;
        out.explained_variance[c] = sigma * sigma / dof;
    }
    out.components = multiply_at_b(centred, left.basis);  // p x k, columns scaled by sigma
    for (std::size_t c = 0; c < k; ++c) {
        const double sigma = left.singular_values[c];
        auto col = out.components.col(c);
        for (double& v : col) v = sigma > 0.0 ? v / sigma : 0.0;
    }
    return out;
}

FeatureTable pca_features(const DenseTensor& y, std::size_t k, const Covariates& covariates,
                          const std::vector<int>& labels, const std::vector<std::string>& subject_ids) {
    const auto vectors = vectorize_upper(y);
    const PcaResult result = pca(vectors.values, k);
    std::vector<std::string> names;
    for (std::size_t c = 0; c < k; ++c) names.push_back("pc" + std::to_string(c + 1));
    return combine_with_covariates(std::move(names), result.scores, covariates, labels, subject_ids);
}

AtlasClusterMap::AtlasClusterMap(Membership groups, std::vector<std::string> group_names)
    : groups_(std::move(groups)), names_(std::move(group_names)) {
    if (!groups_.all_nonempty()) throw DataError("AtlasClusterMap: every cluster id must cover at least one ROI");
    if (names_.empty()) {
        for (std::size_t a = 0; a < groups_.r(); ++a) names_.push_back("region" + std::to_string(a + 1));
    }
    if (names_.size() != groups_.r()) throw ArgumentError("AtlasClusterMap: one name per cluster is required");
}

AtlasClusterMap AtlasClusterMap::brainnetome_lobes() {
    struct Lobe {
        const char* name;
        std::size_t count;
    };
    static constexpr Lobe kLobes[] = {{"frontal", 68},  {"temporal", 56}, {"parietal", 38},  {"insular", 12},
                                      {"limbic", 14},   {"occipital", 22}, {"subcortical", 36}};
    std::vector<std::uint32_t> labels;
    std::vector<std::string> names;
    for (std::uint32_t a = 0; a < std::size(kLobes); ++a) {
        labels.insert(labels.end(), kLobes[a].count, a);
        names.emplace_back(kLobes[a].name);
    }
    Membership groups(std::move(labels), names.size());
    return AtlasClusterMap(std::move(groups), std::move(names));
}

AtlasClusterMap AtlasClusterMap::read(std::istream& in, std::size_t p) {
    std::vector<long> cluster_of(p, 0);
    std::string line;
    std::size_t line_no = 0;
    long max_id = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("roi_index", 0) == 0) continue;
        std::istringstream fields(line);
        long roi = 0, id = 0;
        char comma = 0;
        if (!(fields >> roi >> comma >> id) || comma != ',') {
            throw DataError("atlas map line " + std::to_string(line_no) + ": expected 'roi_index,cluster_id'");
        }
        if (roi < 1 || static_cast<std::size_t>(roi) > p) {
            throw DataError("atlas map line " + std::to_string(line_no) + ": ROI " + std::to_string(roi) +
                            " outside 1.." + std::to_string(p));
        }
        if (id < 1) throw DataError("atlas map line " + std::to_string(line_no) + ": cluster ids are one-based");
        if (cluster_of[static_cast<std::size_t>(roi - 1)] != 0) {
            throw DataError("atlas map: ROI " + std::to_string(roi) + " mapped more than once");
        }
        cluster_of[static_cast<std::size_t>(roi - 1)] = id;
        max_id = std::max(max_id, id);
    }
    std::vector<std::uint32_t> labels(p);
    for (std::size_t j = 0; j < p; ++j) {
        if (cluster_of[j] == 0) throw DataError("atlas map: ROI " + std::to_string(j + 1) + " is unmapped");
        labels[j] = static_cast<std::uint32_t>(cluster_of[j] - 1);
    }
    return AtlasClusterMap(Membership(std::move(labels), static_cast<std::size_t>(max_id)));
}

void AtlasClusterMap::write(std::ostream& out) const {
    out << "roi_index,cluster_id\n";
    for (std::size_t j = 0; j < groups_.size(); ++j) out << j + 1 << ',' << groups_[j] + 1 << '\n';
}

FeatureTable atlas_features(const DenseTensor& y, const AtlasClusterMap& atlas, const Covariates& covariates,
                            const std::vector<int>& labels, const std::vector<std::string>& subject_ids) {
    require_connectome_shape(y, "atlas_features");
    if (atlas.groups().size() != y.dim(2)) {
        throw DataError("atlas_features: atlas covers " + std::to_string(atlas.groups().size()) + " ROIs, data has " +
                        std::to_string(y.dim(2)));
    }
    return assemble_features(y, atlas.groups(), covariates, labels, subject_ids);
}

FeatureTable raw_features(const DenseTensor& y, const Covariates& covariates, const std::vector<int>& labels,
                          const std::vector<std::string>& subject_ids) {
    auto vectors = vectorize_upper(y);
    return combine_with_covariates(std::move(vectors.names), vectors.values, covariates, labels, subject_ids);
}

}  // namespace tbm
