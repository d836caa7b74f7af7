#include "chex/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace chex::oracle {

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
// eigenvalues (descending) and the matching eigenvector columns.
void jacobi_eigen(Matrix s, std::vector<double>& values, Matrix& vectors) {
    const std::size_t n = s.rows();
    vectors = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) vectors(i, i) = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += s(p, q) * s(p, q);
        }
        if (off <= 1e-26 * (1.0 + frobenius_norm(s))) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double spq = s(p, q);
                if (std::abs(spq) <= 1e-300) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * spq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double skp = s(k, p);
                    const double skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double spk = s(p, k);
                    const double sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = vectors(k, p);
                    const double vkq = vectors(k, q);
                    vectors(k, p) = c * vkp - sn * vkq;
                    vectors(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    values.resize(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = s(i, i);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<double> sorted_vals(n);
    Matrix sorted_vecs(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        sorted_vals[k] = values[order[k]];
        for (std::size_t r = 0; r < n; ++r) sorted_vecs(r, k) = vectors(r, order[k]);
    }
    values = std::move(sorted_vals);
    vectors = std::move(sorted_vecs);
}

Matrix gram(const Matrix& w) {
    const std::size_t n = w.cols();
    Matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < w.rows(); ++r) s += w(r, i) * w(r, j);
            g(i, j) = s;
            g(j, i) = s;
        }
    }
    return g;
}

}  // namespace

OracleSvd full_svd(const Matrix& w) {
    OracleSvd out;
    std::vector<double> lambda;
    jacobi_eigen(gram(w), lambda, out.right_vectors);
    out.singular_values.resize(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        out.singular_values[i] = std::sqrt(std::max(lambda[i], 0.0));
    }
    return out;
}

std::vector<double> leverage_scores(const Matrix& w, std::size_t c) {
    OracleSvd svd = full_svd(w);
    const std::size_t keep = std::min(c, w.cols());
    std::vector<double> out(w.cols(), 0.0);
    for (std::size_t j = 0; j < w.cols(); ++j) {
        for (std::size_t k = 0; k < keep; ++k) {
            out[j] += svd.right_vectors(j, k) * svd.right_vectors(j, k);
        }
    }
    return out;
}

std::vector<double> projection_residual(const Matrix& basis, const std::vector<double>& y) {
    if (basis.cols() > 0 && basis.rows() != y.size()) {
        throw ShapeError("oracle projection: row count mismatch");
    }
    std::vector<double> residual = y;
    if (basis.cols() == 0) return residual;

    const std::size_t nb = basis.cols();
    std::vector<double> lambda;
    Matrix q;
    jacobi_eigen(gram(basis), lambda, q);
    const double cutoff = lambda.empty() ? 0.0 : 1e-12 * std::max(lambda.front(), 0.0);

    // x = Q diag(1/lambda) Q^T B^T y, then residual = y - B x
    std::vector<double> bty(nb, 0.0);
    for (std::size_t j = 0; j < nb; ++j) {
        for (std::size_t r = 0; r < basis.rows(); ++r) bty[j] += basis(r, j) * y[r];
    }
    std::vector<double> qtb(nb, 0.0);
    for (std::size_t k = 0; k < nb; ++k) {
        for (std::size_t j = 0; j < nb; ++j) qtb[k] += q(j, k) * bty[j];
        qtb[k] = (lambda[k] > cutoff && lambda[k] > 0.0) ? qtb[k] / lambda[k] : 0.0;
    }
    std::vector<double> x(nb, 0.0);
    for (std::size_t j = 0; j < nb; ++j) {
        for (std::size_t k = 0; k < nb; ++k) x[j] += q(j, k) * qtb[k];
    }
    for (std::size_t r = 0; r < basis.rows(); ++r) {
        double p = 0.0;
        for (std::size_t j = 0; j < nb; ++j) p += basis(r, j) * x[j];
        residual[r] -= p;
    }
    return residual;
}

double reconstruction_error(const Matrix& w, const std::vector<std::size_t>& selected,
                            bool spectral) {
    const Matrix basis = w.select_columns(selected);
    Matrix residual(w.rows(), w.cols());
    for (std::size_t j = 0; j < w.cols(); ++j) {
        std::vector<double> r = projection_residual(basis, w.column(j));
        for (std::size_t i = 0; i < w.rows(); ++i) residual(i, j) = r[i];
    }
    if (!spectral) return frobenius_norm(residual);
    OracleSvd svd = full_svd(residual);
    return svd.singular_values.empty() ? 0.0 : svd.singular_values.front();
}

CssOracleResult brute_force_css(const Matrix& w, std::size_t c, bool spectral) {
    const std::size_t n = w.cols();
    if (n > 12) throw std::invalid_argument("brute_force_css: refusing more than 12 columns");
    if (c == 0 || c > n) throw std::invalid_argument("brute_force_css: c out of range");

    CssOracleResult out;
    out.best_error = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> subset(c);
    std::iota(subset.begin(), subset.end(), 0);
    while (true) {
        const double err = reconstruction_error(w, subset, spectral);
        std::uint32_t mask = 0;
        for (std::size_t j : subset) mask |= (1u << j);
        out.all_errors[mask] = err;
        if (err < out.best_error) {
            out.best_error = err;
            out.best_subset = subset;
        }
        // next combination in lexicographic order
        std::size_t i = c;
        while (i > 0 && subset[i - 1] == n - c + i - 1) --i;
        if (i == 0) break;
        ++subset[i - 1];
        for (std::size_t k = i; k < c; ++k) subset[k] = subset[k - 1] + 1;
    }
    return out;
}

std::vector<double> finite_diff_grad(const std::function<double(const std::vector<double>&)>& loss_fn,
                                     std::vector<double> params, double h) {
    if (h < 1e-7 || h > 1e-3) throw std::invalid_argument("finite_diff_grad: h out of range");
    std::vector<double> grad(params.size(), 0.0);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + h;
        const double fp = loss_fn(params);
        params[i] = saved - h;
        const double fm = loss_fn(params);
        params[i] = saved;
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

FrequencyResult frequency_test(const std::function<std::size_t()>& draw_fn,
                               const std::vector<double>& expected_probs, std::size_t trials) {
    if (trials < 10000) throw std::invalid_argument("frequency_test: need at least 10000 trials");
    std::vector<std::size_t> counts(expected_probs.size(), 0);
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t k = draw_fn();
        if (k >= counts.size()) throw std::out_of_range("frequency_test: draw outside support");
        ++counts[k];
    }
    FrequencyResult out;
    out.empirical.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out.empirical[i] = static_cast<double>(counts[i]) / static_cast<double>(trials);
        out.tv_distance += 0.5 * std::abs(out.empirical[i] - expected_probs[i]);
        const double expected = expected_probs[i] * static_cast<double>(trials);
        if (expected > 0.0) {
            const double d = static_cast<double>(counts[i]) - expected;
            out.chi_square += d * d / expected;
        }
    }
    return out;
}

}  // namespace chex::oracle
