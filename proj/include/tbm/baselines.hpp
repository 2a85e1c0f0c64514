#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "tbm/features.hpp"
#include "tbm/matrix.hpp"
#include "tbm/membership.hpp"
#include "tbm/tensor.hpp"

namespace tbm {

/// Upper triangles (with diagonal) of every modality slice, concatenated per
/// subject: n x (modalities * p(p+1)/2). Names follow "fun(i,j)" with ROI indices.
struct ConnectomeVectors {
    DenseMatrix values;
    std::vector<std::string> names;
};
ConnectomeVectors vectorize_upper(const DenseTensor& y, const std::vector<std::string>& prefixes = kModalityPrefixes);

struct PcaResult {
    DenseMatrix scores;                       // n x k
    DenseMatrix components;                   // p x k, orthonormal
    std::vector<double> explained_variance;  // per component, divisor n - 1
    std::vector<double> column_means;
};

/// Column-centres x (no rescaling) and projects onto its top-k right singular
/// directions. Works through the n x n Gram matrix, so wide inputs are cheap.
PcaResult pca(const DenseMatrix& x, std::size_t k);

/// PCA on the connectome vectors, then covariates appended; columns "pc1".."pck".
FeatureTable pca_features(const DenseTensor& y, std::size_t k, const Covariates& covariates,
                          const std::vector<int>& labels, const std::vector<std::string>& subject_ids = {});

/// Fixed ROI -> region grouping. File format: one "roi_index,cluster_id" line
/// per ROI, both one-based; lines starting with '#' and a header are ignored.
class AtlasClusterMap {
public:
    AtlasClusterMap() = default;
    explicit AtlasClusterMap(Membership groups, std::vector<std::string> group_names = {});

    /// Brainnetome lobes for the 246-ROI parcellation in atlas order:
    /// frontal 1-68, temporal 69-124, parietal 125-162, insular 163-174,
    /// limbic 175-188, occipital 189-210, subcortical 211-246.
    static AtlasClusterMap brainnetome_lobes();

    static AtlasClusterMap read(std::istream& in, std::size_t p);
    void write(std::ostream& out) const;

    const Membership& groups() const { return groups_; }
    const std::vector<std::string>& group_names() const { return names_; }

private:
    Membership groups_;
    std::vector<std::string> names_;
};

/// Block-mean features with the atlas grouping in place of learned clusters.
FeatureTable atlas_features(const DenseTensor& y, const AtlasClusterMap& atlas, const Covariates& covariates,
                            const std::vector<int>& labels, const std::vector<std::string>& subject_ids = {});

/// All deduplicated connectome entries plus covariates, without reduction.
FeatureTable raw_features(const DenseTensor& y, const Covariates& covariates, const std::vector<int>& labels,
                          const std::vector<std::string>& subject_ids = {});

/// Column count of raw_features: modalities * p(p+1)/2 + 4.
constexpr std::size_t raw_feature_count(std::size_t p, std::size_t modalities = 2) {
    return modalities * p * (p + 1) / 2 + 4;
}

}  // namespace tbm
