#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tbm/clustering.hpp"
#include "tbm/error.hpp"
#include "tbm/random.hpp"

namespace tbm {
namespace {

double squared_distance(const DenseMatrix& x, std::size_t i, const DenseMatrix& c, std::size_t k) {
    double s = 0.0;
    for (std::size_t d = 0; d < x.cols(); ++d) {
        const double diff = x(i, d) - c(k, d);
        s += diff * diff;
    }
    return s;
}

double squared_distance_rows(const DenseMatrix& x, std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t d = 0; d < x.cols(); ++d) {
        const double diff = x(i, d) - x(j, d);
        s += diff * diff;
    }
    return s;
}

// Assign each point to its nearest centroid; returns per-point costs.
std::vector<double> assign(const DenseMatrix& x, const DenseMatrix& centroids, std::vector<std::uint32_t>& labels) {
    const std::size_t n = x.rows();
    const std::size_t k = centroids.rows();
    std::vector<double> cost(n);
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t arg = 0;
        for (std::size_t c = 0; c < k; ++c) {
            const double d = squared_distance(x, i, centroids, c);
            if (d < best) {
                best = d;
                arg = static_cast<std::uint32_t>(c);
            }
        }
        labels[i] = arg;
        cost[i] = best;
    }
    return cost;
}

// Re-seed each empty cluster with the point of largest cost among clusters
// that can spare one.
void repair_empty(std::vector<std::uint32_t>& labels, std::vector<double>& cost, std::size_t k) {
    std::vector<std::size_t> sizes(k, 0);
    for (auto l : labels) ++sizes[l];
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] != 0) continue;
        std::size_t arg = labels.size();
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (sizes[labels[i]] < 2) continue;
            if (arg == labels.size() || cost[i] > cost[arg]) arg = i;
        }
        --sizes[labels[arg]];
        labels[arg] = static_cast<std::uint32_t>(c);
        cost[arg] = 0.0;
        ++sizes[c];
    }
}

DenseMatrix centroids_of(const DenseMatrix& x, const std::vector<std::uint32_t>& labels, std::size_t k) {
    DenseMatrix c(k, x.cols());
    std::vector<std::size_t> sizes(k, 0);
    for (auto l : labels) ++sizes[l];
    for (std::size_t d = 0; d < x.cols(); ++d) {
        for (std::size_t i = 0; i < x.rows(); ++i) c(labels[i], d) += x(i, d);
        for (std::size_t a = 0; a < k; ++a) c(a, d) /= static_cast<double>(sizes[a]);
    }
    return c;
}

double inertia(const DenseMatrix& x, const DenseMatrix& c, const std::vector<std::uint32_t>& labels) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) s += squared_distance(x, i, c, labels[i]);
    return s;
}

}  // namespace

std::vector<std::size_t> kmeanspp_seed(const DenseMatrix& points, std::size_t k, std::uint64_t seed) {
    const std::size_t n = points.rows();
    if (k == 0 || k > n) {
        throw ArgumentError("kmeanspp_seed: k = " + std::to_string(k) + " must be in [1, " + std::to_string(n) + "]");
    }
    for (double v : points.data())
        if (!std::isfinite(v)) throw DataError("kmeanspp_seed: points contain non-finite values");

    Rng rng(seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    std::vector<bool> taken(n, false);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

    auto take = [&](std::size_t idx) {
        chosen.push_back(idx);
        taken[idx] = true;
        for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], squared_distance_rows(points, i, idx));
        nearest[idx] = 0.0;
    };

    take(rng.index(n));
    while (chosen.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!taken[i]) total += nearest[i];
        if (total > 0.0) {
            take(rng.weighted_index(nearest));
            continue;
        }
        // All remaining points coincide with a seed.
        std::vector<std::size_t> free;
        for (std::size_t i = 0; i < n; ++i)
            if (!taken[i]) free.push_back(i);
        take(free[rng.index(free.size())]);
    }
    return chosen;
}

KMeansResult kmeans(const DenseMatrix& points, std::size_t k, std::uint64_t seed, std::size_t max_iters) {
    const std::size_t n = points.rows();
    const auto seeds = kmeanspp_seed(points, k, seed);
    DenseMatrix centroids = select_rows(points, seeds);

    std::vector<std::uint32_t> labels(n, 0);
    std::vector<std::uint32_t> previous;
    KMeansResult out;
    const std::size_t limit = std::max<std::size_t>(max_iters, 1);
    for (std::size_t it = 0; it < limit; ++it) {
        auto cost = assign(points, centroids, labels);
        repair_empty(labels, cost, k);
        if (labels == previous) break;
        centroids = centroids_of(points, labels, k);
        out.inertia_trace.push_back(inertia(points, centroids, labels));
        out.iterations = it + 1;
        previous = labels;
    }
    out.membership = Membership(std::move(labels), k);
    out.centroids = std::move(centroids);
    return out;
}

}  // namespace tbm
