#include "block_stats.hpp"

namespace tbm::detail {

DenseTensor block_means_tolerant(const DenseTensor& y, const Membership& z, bool* empty) {
    const BlockShape sh(y, z);
    DenseTensor means({y.dim(0), y.dim(1), sh.r, sh.r});
    auto out = means.data();
    auto src = y.data();
    for (std::size_t j4 = 0; j4 < sh.p; ++j4) {
        const std::size_t b = z[j4];
        for (std::size_t j3 = 0; j3 < sh.p; ++j3) {
            const std::size_t a = z[j3];
            const double* in = src.data() + sh.slices * (j3 + sh.p * j4);
            double* acc = out.data() + sh.slices * (a + sh.r * b);
            for (std::size_t s = 0; s < sh.slices; ++s) acc[s] += in[s];
        }
    }
    const auto sizes = z.cluster_sizes();
    bool any_empty = false;
    for (std::size_t b = 0; b < sh.r; ++b) {
        for (std::size_t a = 0; a < sh.r; ++a) {
            const double count = static_cast<double>(sizes[a]) * static_cast<double>(sizes[b]);
            double* acc = out.data() + sh.slices * (a + sh.r * b);
            if (count == 0.0) {
                any_empty = true;
                continue;
            }
            for (std::size_t s = 0; s < sh.slices; ++s) acc[s] /= count;
        }
    }
    if (empty) *empty = any_empty;
    return means;
}

double residual_for(const DenseTensor& y, const Membership& z, const DenseTensor& means) {
    const BlockShape sh(y, z);
    auto src = y.data();
    auto mu = means.data();
    double total = 0.0;
    for (std::size_t j4 = 0; j4 < sh.p; ++j4) {
        const std::size_t b = z[j4];
        for (std::size_t j3 = 0; j3 < sh.p; ++j3) {
            const double* in = src.data() + sh.slices * (j3 + sh.p * j4);
            const double* m = mu.data() + sh.slices * (z[j3] + sh.r * b);
            for (std::size_t s = 0; s < sh.slices; ++s) {
                const double d = in[s] - m[s];
                total += d * d;
            }
        }
    }
    return total;
}

}  // namespace tbm::detail
