#include <string>

#include "tbm/clustering.hpp"
#include "tbm/error.hpp"

namespace tbm {

Membership phsc_init(const DenseTensor& y, std::size_t r, std::uint64_t seed, const SpectralInitOptions& opts) {
    require_connectome_shape(y, "phsc_init");
    const std::size_t p = y.dim(2);
    if (r == 0 || r > p) {
        throw ArgumentError("phsc_init: r = " + std::to_string(r) + " must be in [1, " + std::to_string(p) + "]");
    }
    if (r == 1) return Membership::single(p);

    constexpr std::size_t roi_mode = 2;
    constexpr std::size_t partner_mode = 3;

    const DenseMatrix first = svd_r(matricize(y, roi_mode), r, opts.svd).basis;
    const DenseTensor reduced = mode_product(y, first.transposed(), partner_mode);
    const DenseMatrix second = svd_r(matricize(reduced, roi_mode), r, opts.svd).basis;

    const DenseMatrix projected = matricize(mode_product(y, second.transposed(), partner_mode), roi_mode);
    const DenseMatrix denoised = multiply(second, multiply_at_b(second, projected));  // p x (n*m*r)

    return kmeans(denoised, r, seed, opts.kmeans_max_iters).membership;
}

}  // namespace tbm
