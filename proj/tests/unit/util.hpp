#pragma once

#include "kresid/core.hpp"
#include "kresid/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace testutil {

using kresid::Index;
using kresid::Matrix;

inline Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
    kresid::CounterRng rng(seed);
    std::normal_distribution<double> z;
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index c = 0; c < cols; ++c) m(i, c) = z(rng);
    return m;
}

// Entrywise |a - b| <= tol * max(|b|, max|B|): relative error with the
// matrix scale as floor so cancelled entries do not dominate.
inline double max_rel_error(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
    const double scale = b.cwiseAbs().maxCoeff();
    double worst = 0.0;
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j) {
            const double denom = std::max({std::abs(b(i, j)), scale, 1e-300});
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / denom);
        }
    return worst;
}

inline double rel_error(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace testutil
