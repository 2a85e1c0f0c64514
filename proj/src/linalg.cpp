#include "tbm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tbm/error.hpp"
#include "tbm/random.hpp"

namespace tbm {
namespace {

void require_finite(const DenseMatrix& a, const char* op) {
    for (double v : a.data())
        if (!std::isfinite(v)) throw DataError(std::string(op) + ": matrix contains non-finite entries");
}

// sqrt(2) * ||q_new - q_old (q_old^T q_new)||_F equals the Frobenius distance
// between the two projectors and avoids cancellation near convergence.
double projector_distance(const DenseMatrix& q_old, const DenseMatrix& q_new) {
    DenseMatrix overlap = multiply_at_b(q_old, q_new);
    DenseMatrix residual = subtract(q_new, multiply(q_old, overlap));
    return std::sqrt(2.0) * residual.frobenius_norm();
}

void fix_signs(DenseMatrix& basis) {
    for (std::size_t j = 0; j < basis.cols(); ++j) {
        auto c = basis.col(j);
        std::size_t arg = 0;
        for (std::size_t i = 1; i < c.size(); ++i)
            if (std::abs(c[i]) > std::abs(c[arg])) arg = i;
        if (c[arg] < 0.0)
            for (double& v : c) v = -v;
    }
}

}  // namespace

DenseMatrix householder_q(const DenseMatrix& a) {
    const std::size_t n = a.rows();
    const std::size_t k = a.cols();
    if (k > n) throw ArgumentError("householder_q: more columns than rows");
    DenseMatrix r = a;
    std::vector<std::vector<double>> reflectors(k);
    for (std::size_t j = 0; j < k; ++j) {
        auto c = r.col(j);
        double norm = 0.0;
        for (std::size_t i = j; i < n; ++i) norm += c[i] * c[i];
        norm = std::sqrt(norm);
        std::vector<double> v(n - j, 0.0);
        if (norm == 0.0) {
            // Zero column: use e_j so Q still gains an orthonormal direction.
            reflectors[j] = {};
            continue;
        }
        const double alpha = c[j] >= 0.0 ? -norm : norm;
        for (std::size_t i = j; i < n; ++i) v[i - j] = c[i];
        v[0] -= alpha;
        double vnorm = 0.0;
        for (double x : v) vnorm += x * x;
        vnorm = std::sqrt(vnorm);
        if (vnorm == 0.0) {
            reflectors[j] = {};
            continue;
        }
        for (double& x : v) x /= vnorm;
        for (std::size_t jj = j; jj < k; ++jj) {
            auto cc = r.col(jj);
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) dot += v[i - j] * cc[i];
            for (std::size_t i = j; i < n; ++i) cc[i] -= 2.0 * dot * v[i - j];
        }
        reflectors[j] = std::move(v);
    }
    // Q = H_0 H_1 ... H_{k-1} applied to the first k columns of the identity.
    DenseMatrix q(n, k);
    for (std::size_t j = 0; j < k; ++j) q(j, j) = 1.0;
    for (std::size_t jj = k; jj-- > 0;) {
        const auto& v = reflectors[jj];
        if (v.empty()) continue;
        for (std::size_t col = 0; col < k; ++col) {
            auto qc = q.col(col);
            double dot = 0.0;
            for (std::size_t i = jj; i < n; ++i) dot += v[i - jj] * qc[i];
            if (dot == 0.0) continue;
            for (std::size_t i = jj; i < n; ++i) qc[i] -= 2.0 * dot * v[i - jj];
        }
    }
    return q;
}

SymmetricEigen symmetric_eigen(const DenseMatrix& s) {
    const std::size_t n = s.rows();
    if (s.cols() != n) throw ArgumentError("symmetric_eigen: matrix is not square");
    DenseMatrix a = s;
    DenseMatrix v = DenseMatrix::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        double diag = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            diag += a(j, j) * a(j, j);
            for (std::size_t i = j + 1; i < n; ++i) off += a(i, j) * a(i, j);
        }
        if (off <= 1e-30 * std::max(diag, 1e-300)) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
    SymmetricEigen out{std::vector<double>(n), DenseMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        std::ranges::copy(v.col(order[k]), out.vectors.col(k).begin());
    }
    return out;
}

SingularSubspace leading_eigenspace(const DenseMatrix& gram, std::size_t r, const SubspaceIterationOptions& opts) {
    const std::size_t p = gram.rows();
    if (gram.cols() != p) throw ArgumentError("leading_eigenspace: Gram matrix is not square");
    if (r == 0 || r > p) {
        throw ArgumentError("leading_eigenspace: rank " + std::to_string(r) + " outside [1, " + std::to_string(p) + "]");
    }
    require_finite(gram, "leading_eigenspace");

    Rng rng(opts.seed);
    DenseMatrix start(p, r);
    for (std::size_t j = 0; j < r; ++j) {
        for (std::size_t i = 0; i < p; ++i) start(i, j) = opts.start_perturbation * rng.normal();
        start(j, j) += 1.0;
    }
    DenseMatrix q = householder_q(start);

    SingularSubspace out;
    for (std::size_t it = 1; it <= opts.max_iters; ++it) {
        DenseMatrix next = householder_q(multiply(gram, q));
        const double delta = projector_distance(q, next);
        q = std::move(next);
        out.iterations = it;
        if (delta < opts.tol) {
            out.converged = true;
            break;
        }
    }

    // Rayleigh-Ritz: rotate the basis onto eigenvectors of the projected Gram.
    DenseMatrix projected = multiply_at_b(q, multiply(gram, q));
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t i = j + 1; i < r; ++i) projected(i, j) = projected(j, i) = 0.5 * (projected(i, j) + projected(j, i));
    SymmetricEigen eig = symmetric_eigen(projected);
    out.basis = multiply(q, eig.vectors);
    fix_signs(out.basis);
    out.singular_values.resize(r);
    for (std::size_t k = 0; k < r; ++k) out.singular_values[k] = std::sqrt(std::max(eig.values[k], 0.0));
    return out;
}

SingularSubspace svd_r(const DenseMatrix& a, std::size_t r, const SubspaceIterationOptions& opts) {
    if (r == 0 || r > std::min(a.rows(), a.cols())) {
        throw ArgumentError("svd_r: rank " + std::to_string(r) + " outside [1, " +
                            std::to_string(std::min(a.rows(), a.cols())) + "]");
    }
    require_finite(a, "svd_r");
    return leading_eigenspace(gram_rows(a), r, opts);
}

}  // namespace tbm
