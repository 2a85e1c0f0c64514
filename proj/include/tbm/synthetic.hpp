#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tbm/features.hpp"
#include "tbm/membership.hpp"
#include "tbm/tensor.hpp"

namespace tbm {

/// Parameters of a planted tensor block model y = S x3 M x4 M + E.
struct PlantedSpec {
    std::size_t n_subjects = 20;
    std::size_t n_modalities = 2;
    std::size_t p = 40;
    std::size_t r_true = 4;
    /// Core entries are core_gap * k for integer k in [0, grid_levels).
    double core_gap = 1.0;
    std::size_t grid_levels = 4;
    double noise_sigma = 0.1;
    bool symmetric = true;
    std::uint64_t seed = 0;
    /// Optional planted cluster sizes (sum p); empty means balanced.
    std::vector<std::size_t> cluster_sizes;

    void validate() const;
};

struct PlantedData {
    DenseTensor y;
    Membership truth;
    CoreTensor core;
    DenseTensor noise;
};

/// Draws memberships, a grid-separated core with pairwise distinct cluster
/// profiles, and i.i.d. Gaussian noise (mirrored across the ROI diagonal when
/// symmetric), then forms y = multilinear_product(S, M on modes 3 and 4) + E.
PlantedData generate(const PlantedSpec& spec);

/// Minimal mismatch fraction over one-to-one relabelings (Hungarian matching).
double misclustering_rate(const Membership& estimate, const Membership& truth);

/// Relabels `estimate` onto the labels of `truth` via the optimal matching.
Membership align_to(const Membership& estimate, const Membership& truth);

/// Labels driven by one planted block mean.
struct LabelSpec {
    double effect = 0.0;
    double prevalence = 0.5;
    std::size_t signal_modality = 1;
    std::size_t signal_a = 0;  // zero-based planted clusters
    std::size_t signal_b = 1;
};

struct LabeledData {
    PlantedData planted;
    std::vector<int> labels;
    Covariates covariates;
    std::vector<std::string> subject_ids;
};

/// Binary labels from logit = logit(prevalence) + effect * (S[i, m, a, b] - c) / core_gap,
/// where c is the centre of the core grid. Covariates are drawn independently
/// of the labels. effect = 0 gives labels independent of every feature.
LabeledData generate_labeled(const PlantedSpec& spec, const LabelSpec& label_spec);

}  // namespace tbm
