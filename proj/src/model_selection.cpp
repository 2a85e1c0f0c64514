#include <cmath>
#include <limits>
#include <string>

#include "tbm/clustering.hpp"
#include "tbm/error.hpp"
#include "tbm/parallel.hpp"

namespace tbm {

double bic_score(const DenseTensor& y, const Membership& z) {
    const double rss = block_residual(y, z);
    if (rss == 0.0) return -std::numeric_limits<double>::infinity();
    const double n_entries = static_cast<double>(y.size());
    const double r = static_cast<double>(z.r());
    const double core_params = static_cast<double>(y.dim(0) * y.dim(1)) * r * r;
    const double log_n = std::log(n_entries);
    return n_entries * std::log(rss / n_entries) + core_params * log_n + static_cast<double>(y.dim(2)) * std::log(r);
}

ModelSelection select_r(const DenseTensor& y, std::span<const std::size_t> r_values, std::uint64_t seed,
                        const SelectOptions& opts) {
    require_connectome_shape(y, "select_r");
    if (r_values.empty()) throw ArgumentError("select_r: empty range of cluster counts");
    for (auto r : r_values) {
        if (r == 0 || r > y.dim(2)) {
            throw ArgumentError("select_r: r = " + std::to_string(r) + " outside [1, " + std::to_string(y.dim(2)) + "]");
        }
    }

    ModelSelection out;
    out.table.resize(r_values.size());
    parallel_for(r_values.size(), opts.workers, [&](std::size_t i) {
        const std::size_t r = r_values[i];
        const Membership z0 = phsc_init(y, r, seed, opts.spectral);
        const HLloydResult fit = hlloyd_refine(y, z0, {r, opts.hlloyd_max_iters, opts.hlloyd_tol});
        BicRow row;
        row.r = r;
        row.residual = fit.residual_trace.back();
        row.bic = bic_score(y, fit.membership);
        row.iterations = fit.iterations;
        row.membership = fit.membership;
        out.table[i] = std::move(row);
    });

    const BicRow* best = &out.table.front();
    for (const auto& row : out.table) {
        if (row.bic < best->bic || (row.bic == best->bic && row.r < best->r)) best = &row;
    }
    out.best_r = best->r;
    return out;
}

}  // namespace tbm
