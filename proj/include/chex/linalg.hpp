#pragma once

#include <cstddef>
#include <vector>

#include "chex/matrix.hpp"
#include "chex/svd.hpp"

namespace chex {

enum class MatrixNorm { kFrobenius, kSpectral };

struct LeverageScores {
    std::vector<double> scores;  // one per column, each in [0, 1]
    std::size_t c = 0;           // effective count of singular vectors used
};

// Squared row norms of the top-c right singular vectors, one per column.
// c is clamped to min(rows, cols) and to the numerical rank; the effective
// value is reported back in the result.
LeverageScores leverage_scores(const Matrix& w, std::size_t c);

// Residual norm of projecting w onto the span of the selected columns.
double css_reconstruction_error(const Matrix& w, const std::vector<std::size_t>& selected,
                                MatrixNorm norm = MatrixNorm::kFrobenius);

// Leverage-score column selection: the retain_count columns with the largest
// leverage scores computed at c = retain_count. Ties go to the lower index;
// columns beyond the numerical rank are filled in by largest column norm.
std::vector<std::size_t> css_select(const Matrix& w, std::size_t retain_count);

// Squared residuals of each candidate column after orthogonal projection
// onto the span of the active columns, via the Gram pseudo-inverse.
std::vector<double> orthogonality_scores(const Matrix& active, const Matrix& candidates);

std::vector<double> softmax(const std::vector<double>& values);

}  // namespace chex
