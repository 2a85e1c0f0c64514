#include <limits>
#include <string>

#include "block_stats.hpp"
#include "tbm/clustering.hpp"
#include "tbm/error.hpp"

namespace tbm {
namespace {

using detail::BlockShape;

// Y4[s, j, b]: mean over ROIs l in cluster b of y[s, j, l]. Layout s + slices*(j + p*b).
std::vector<double> collapse_mode4(const DenseTensor& y, const Membership& z) {
    const BlockShape sh(y, z);
    std::vector<double> out(sh.slices * sh.p * sh.r, 0.0);
    auto src = y.data();
    for (std::size_t l = 0; l < sh.p; ++l) {
        const std::size_t b = z[l];
        for (std::size_t j = 0; j < sh.p; ++j) {
            const double* in = src.data() + sh.slices * (j + sh.p * l);
            double* acc = out.data() + sh.slices * (j + sh.p * b);
            for (std::size_t s = 0; s < sh.slices; ++s) acc[s] += in[s];
        }
    }
    const auto sizes = z.cluster_sizes();
    for (std::size_t b = 0; b < sh.r; ++b) {
        if (sizes[b] == 0) continue;
        const double inv = 1.0 / static_cast<double>(sizes[b]);
        for (std::size_t j = 0; j < sh.p; ++j) {
            double* acc = out.data() + sh.slices * (j + sh.p * b);
            for (std::size_t s = 0; s < sh.slices; ++s) acc[s] *= inv;
        }
    }
    return out;
}

// argmin_a sum_{s,b} (Y4[s, j, b] - S[s, a, b])^2 for every ROI j, followed by
// empty-cluster repair.
Membership update_labels(const DenseTensor& y, const Membership& z, const DenseTensor& means) {
    const BlockShape sh(y, z);
    const auto collapsed = collapse_mode4(y, z);
    auto mu = means.data();
    std::vector<std::uint32_t> labels(sh.p);
    std::vector<double> cost(sh.p);
    for (std::size_t j = 0; j < sh.p; ++j) {
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t arg = 0;
        for (std::size_t a = 0; a < sh.r; ++a) {
            double d = 0.0;
            for (std::size_t b = 0; b < sh.r; ++b) {
                const double* lhs = collapsed.data() + sh.slices * (j + sh.p * b);
                const double* rhs = mu.data() + sh.slices * (a + sh.r * b);
                for (std::size_t s = 0; s < sh.slices; ++s) {
                    const double diff = lhs[s] - rhs[s];
                    d += diff * diff;
                }
            }
            if (d < best) {
                best = d;
                arg = static_cast<std::uint32_t>(a);
            }
        }
        labels[j] = arg;
        cost[j] = best;
    }

    std::vector<std::size_t> sizes(sh.r, 0);
    for (auto l : labels) ++sizes[l];
    for (std::size_t c = 0; c < sh.r; ++c) {
        if (sizes[c] != 0) continue;
        std::size_t arg = sh.p;
        for (std::size_t j = 0; j < sh.p; ++j) {
            if (sizes[labels[j]] < 2) continue;
            if (arg == sh.p || cost[j] > cost[arg]) arg = j;
        }
        --sizes[labels[arg]];
        labels[arg] = static_cast<std::uint32_t>(c);
        cost[arg] = 0.0;
        ++sizes[c];
    }
    return Membership(std::move(labels), sh.r);
}

}  // namespace

HLloydResult hlloyd_refine(const DenseTensor& y, const Membership& z0, const HLloydConfig& cfg) {
    require_connectome_shape(y, "hlloyd_refine");
    if (z0.size() != y.dim(2)) {
        throw ArgumentError("hlloyd_refine: membership has " + std::to_string(z0.size()) + " labels for " +
                            std::to_string(y.dim(2)) + " ROIs");
    }
    if (cfg.r != 0 && cfg.r != z0.r()) throw ArgumentError("hlloyd_refine: config r differs from membership r");
    if (cfg.max_iters == 0) throw ArgumentError("hlloyd_refine: max_iters must be at least 1");
    if (z0.r() > z0.size()) throw ArgumentError("hlloyd_refine: more clusters than ROIs");

    HLloydResult out;
    Membership z = z0;
    DenseTensor means = detail::block_means_tolerant(y, z);
    out.residual_trace.push_back(detail::residual_for(y, z, means));

    for (std::size_t t = 0; t < cfg.max_iters; ++t) {
        Membership next = update_labels(y, z, means);
        if (next == z) {
            out.converged = true;
            break;
        }
        z = std::move(next);
        means = detail::block_means_tolerant(y, z);
        out.iterations = t + 1;
        const double previous = out.residual_trace.back();
        const double current = detail::residual_for(y, z, means);
        out.residual_trace.push_back(current);
        if (cfg.tol > 0.0 && previous - current <= cfg.tol * previous) {
            out.converged = true;
            break;
        }
    }
    out.membership = std::move(z);
    out.core = CoreTensor(std::move(means));
    return out;
}

double block_residual(const DenseTensor& y, const Membership& z) {
    require_connectome_shape(y, "block_residual");
    if (z.size() != y.dim(2)) throw ArgumentError("block_residual: membership length differs from ROI count");
    return detail::residual_for(y, z, detail::block_means_tolerant(y, z));
}

}  // namespace tbm
