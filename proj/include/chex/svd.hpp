#pragma once

#include <cstddef>
#include <vector>

#include "chex/matrix.hpp"

namespace chex {

// Relative cutoff below which singular values are treated as zero
// (pseudo-inverse truncation and numerical rank).
inline constexpr double kRankTolerance = 1e-10;

struct SvdFactors {
    std::vector<double> singular_values;  // non-increasing, >= 0
    Matrix right_vectors;                 // cols x c, orthonormal columns
};

// Full decomposition kept internal to the module; tests reach it through
// the public operations below.
struct FullSvd {
    std::vector<double> singular_values;  // all min-side values, sorted non-increasing
    Matrix left_vectors;                  // rows x n, columns a_j / sigma_j (zero where sigma ~ 0)
    Matrix right_vectors;                 // cols x n, orthonormal
};

// One-sided Jacobi: orthogonalizes the columns of a working copy of w by
// plane rotations, accumulating them into V. Deterministic for a given
// input; adequate for the desk-scale shapes this project uses.
FullSvd svd_jacobi(const Matrix& w);

std::size_t numerical_rank(const std::vector<double>& singular_values);

SvdFactors top_right_singular_vectors(const Matrix& w, std::size_t c);

Matrix pseudo_inverse(const Matrix& w);

}  // namespace chex
