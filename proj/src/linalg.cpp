#include "chex/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace chex {

LeverageScores leverage_scores(const Matrix& w, std::size_t c) {
    if (c == 0) throw std::invalid_argument("leverage_scores: c must be >= 1");
    if (!w.all_finite()) throw InvalidInput("leverage_scores: non-finite input");

    FullSvd full = svd_jacobi(w);
    const std::size_t rank = numerical_rank(full.singular_values);
    const std::size_t c_eff = std::min({c, std::min(w.rows(), w.cols()), std::max<std::size_t>(rank, 0)});

    LeverageScores out;
    out.c = c_eff;
    out.scores.assign(w.cols(), 0.0);
    for (std::size_t j = 0; j < w.cols(); ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < c_eff; ++k) {
            const double v = full.right_vectors(j, k);
            s += v * v;
        }
        out.scores[j] = s;
    }
    return out;
}

double css_reconstruction_error(const Matrix& w, const std::vector<std::size_t>& selected,
                                MatrixNorm norm) {
    if (selected.empty()) throw std::invalid_argument("css_reconstruction_error: empty selection");
    for (std::size_t j : selected) {
        if (j >= w.cols()) throw std::invalid_argument("css_reconstruction_error: index out of range");
    }
    if (!w.all_finite()) throw InvalidInput("css_reconstruction_error: non-finite input");

    const Matrix wc = w.select_columns(selected);
    const Matrix residual = w - wc * (pseudo_inverse(wc) * w);
    if (norm == MatrixNorm::kFrobenius) return frobenius_norm(residual);
    FullSvd full = svd_jacobi(residual);
    return full.singular_values.empty() ? 0.0 : full.singular_values.front();
}

std::vector<std::size_t> css_select(const Matrix& w, std::size_t retain_count) {
    if (retain_count == 0 || retain_count > w.cols()) {
        throw std::invalid_argument("css_select: retain_count out of range");
    }
    const LeverageScores lev = leverage_scores(w, retain_count);

    std::vector<std::size_t> order(w.cols());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return lev.scores[a] > lev.scores[b];
    });

    std::vector<std::size_t> retained(order.begin(),
                                      order.begin() + static_cast<long>(std::min(lev.c, retain_count)));

    if (retained.size() < retain_count) {
        // Rank-deficient case: leverage scores only rank the top-c_eff
        // directions, remaining slots go to the largest column norms.
        std::vector<char> taken(w.cols(), 0);
        for (std::size_t j : retained) taken[j] = 1;
        std::vector<double> col_norm(w.cols(), 0.0);
        for (std::size_t r = 0; r < w.rows(); ++r) {
            for (std::size_t j = 0; j < w.cols(); ++j) col_norm[j] += w(r, j) * w(r, j);
        }
        std::vector<std::size_t> rest;
        for (std::size_t j = 0; j < w.cols(); ++j) {
            if (!taken[j]) rest.push_back(j);
        }
        std::stable_sort(rest.begin(), rest.end(),
                         [&](std::size_t a, std::size_t b) { return col_norm[a] > col_norm[b]; });
        for (std::size_t j : rest) {
            if (retained.size() == retain_count) break;
            retained.push_back(j);
        }
    }
    std::sort(retained.begin(), retained.end());
    return retained;
}

std::vector<double> orthogonality_scores(const Matrix& active, const Matrix& candidates) {
    if (active.cols() > 0 && active.rows() != candidates.rows()) {
        throw ShapeError("orthogonality_scores: row count mismatch");
    }
    const std::size_t k = candidates.rows();
    const std::size_t nc = candidates.cols();
    std::vector<double> out(nc, 0.0);

    if (active.cols() == 0) {
        for (std::size_t j = 0; j < nc; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < k; ++r) s += candidates(r, j) * candidates(r, j);
            out[j] = s;
        }
        return out;
    }

    // eps_j = || y - A (A^T A)+ A^T y ||^2
    const Matrix gram_pinv = pseudo_inverse(active.transposed() * active);
    const Matrix coeffs = gram_pinv * (active.transposed() * candidates);
    const Matrix projected = active * coeffs;
    for (std::size_t j = 0; j < nc; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < k; ++r) {
            const double d = candidates(r, j) - projected(r, j);
            s += d * d;
        }
        out[j] = s;
    }
    return out;
}

std::vector<double> softmax(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("softmax: empty input");
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidInput("softmax: non-finite input");
    }
    const double shift = *std::max_element(values.begin(), values.end());
    std::vector<double> out(values.size());
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = std::exp(values[i] - shift);
        total += out[i];
    }
    for (double& p : out) p /= total;
    return out;
}

}  // namespace chex
