#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "chex/matrix.hpp"

// Brute-force and duplicate-implementation reference paths. Everything here
// is written against the math directly and shares nothing with the linalg
// or simnet implementations beyond the Matrix container.
namespace chex::oracle {

struct OracleSvd {
    std::vector<double> singular_values;  // non-increasing
    Matrix right_vectors;                 // cols x cols, orthonormal
};

// Full SVD via cyclic Jacobi eigendecomposition of the Gram matrix w^T w.
// The eigenvectors are the right singular vectors and sigma = sqrt(lambda).
OracleSvd full_svd(const Matrix& w);

// Squared-row-norm leverage scores from the oracle's right vectors.
std::vector<double> leverage_scores(const Matrix& w, std::size_t c);

// Residual of projecting y onto span(basis), solved through the normal
// equations with the oracle eigendecomposition.
std::vector<double> projection_residual(const Matrix& basis, const std::vector<double>& y);

// Reconstruction error of w from the selected columns, column by column.
double reconstruction_error(const Matrix& w, const std::vector<std::size_t>& selected,
                            bool spectral = false);

struct CssOracleResult {
    std::vector<std::size_t> best_subset;
    double best_error = 0.0;
    std::map<std::uint32_t, double> all_errors;  // bitmask of selected columns -> error
};

// Exhaustive optimum over all (cols choose c) subsets. Refuses above 12
// columns to keep runtime bounded.
CssOracleResult brute_force_css(const Matrix& w, std::size_t c, bool spectral = false);

// Central differences per coordinate.
std::vector<double> finite_diff_grad(const std::function<double(const std::vector<double>&)>& loss_fn,
                                     std::vector<double> params, double h);

struct FrequencyResult {
    std::vector<double> empirical;
    double tv_distance = 0.0;
    double chi_square = 0.0;
};

// Empirical single-draw distribution of draw_fn against expected_probs.
FrequencyResult frequency_test(const std::function<std::size_t()>& draw_fn,
                               const std::vector<double>& expected_probs, std::size_t trials);

}  // namespace chex::oracle
