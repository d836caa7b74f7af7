#include "chex/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace chex {

namespace {

double column_dot(const Matrix& a, std::size_t p, std::size_t q) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) s += a(r, p) * a(r, q);
    return s;
}

void rotate_columns(Matrix& a, std::size_t p, std::size_t q, double cs, double sn) {
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const double ap = a(r, p);
        const double aq = a(r, q);
        a(r, p) = cs * ap - sn * aq;
        a(r, q) = sn * ap + cs * aq;
    }
}

}  // namespace

FullSvd svd_jacobi(const Matrix& w) {
    if (!w.all_finite()) throw InvalidInput("svd: non-finite entries in input");
    const std::size_t m = w.rows();
    const std::size_t n = w.cols();

    Matrix a = w;  // columns converge to sigma_j * u_j
    Matrix v(n, n);
    for (std::size_t j = 0; j < n; ++j) v(j, j) = 1.0;

    const double tol = 1e-14;
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double app = column_dot(a, p, p);
                const double aqq = column_dot(a, q, q);
                const double apq = column_dot(a, p, q);
                if (std::abs(apq) <= tol * std::sqrt(app * aqq) || apq == 0.0) continue;
                rotated = true;
                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                rotate_columns(a, p, q, cs, sn);
                rotate_columns(v, p, q, cs, sn);
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(column_dot(a, j, j));

    // Sort non-increasing; stable so equal values keep column order.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

    FullSvd out;
    out.singular_values.resize(n);
    out.left_vectors = Matrix(m, n);
    out.right_vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        const double s = sigma[j];
        out.singular_values[k] = s;
        for (std::size_t r = 0; r < n; ++r) out.right_vectors(r, k) = v(r, j);
        if (s > 0.0) {
            for (std::size_t r = 0; r < m; ++r) out.left_vectors(r, k) = a(r, j) / s;
        }
    }
    return out;
}

std::size_t numerical_rank(const std::vector<double>& singular_values) {
    if (singular_values.empty()) return 0;
    const double cutoff = kRankTolerance * singular_values.front();
    std::size_t r = 0;
    for (double s : singular_values) {
        if (s > cutoff && s > 0.0) ++r;
    }
    return r;
}

SvdFactors top_right_singular_vectors(const Matrix& w, std::size_t c) {
    if (c == 0) throw std::invalid_argument("top_right_singular_vectors: c must be >= 1");
    if (!w.all_finite()) throw InvalidInput("top_right_singular_vectors: non-finite input");
    const std::size_t limit = std::min(w.rows(), w.cols());
    const std::size_t keep = std::min(c, limit);

    FullSvd full = svd_jacobi(w);
    SvdFactors out;
    out.singular_values.assign(full.singular_values.begin(),
                               full.singular_values.begin() + static_cast<long>(keep));
    out.right_vectors = Matrix(w.cols(), keep);
    for (std::size_t r = 0; r < w.cols(); ++r) {
        for (std::size_t k = 0; k < keep; ++k) out.right_vectors(r, k) = full.right_vectors(r, k);
    }
    return out;
}

Matrix pseudo_inverse(const Matrix& w) {
    if (!w.all_finite()) throw InvalidInput("pseudo_inverse: non-finite input");
    const std::size_t m = w.rows();
    const std::size_t n = w.cols();
    FullSvd full = svd_jacobi(w);
    const double cutoff =
        full.singular_values.empty() ? 0.0 : kRankTolerance * full.singular_values.front();

    // w+ = sum_j v_j u_j^T / sigma_j over sigma_j above the cutoff
    Matrix out(n, m);
    for (std::size_t k = 0; k < full.singular_values.size(); ++k) {
        const double s = full.singular_values[k];
        if (s <= cutoff || s == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const double vi = full.right_vectors(i, k) / s;
            if (vi == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j) {
                out(i, j) += vi * full.left_vectors(j, k);
            }
        }
    }
    return out;
}

}  // namespace chex
