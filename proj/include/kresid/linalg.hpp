#pragma once

#include "kresid/core.hpp"

#include <Eigen/Cholesky>

namespace kresid {

// Cholesky factorization of a symmetric positive-definite matrix. When the
// factorization fails, diagonal jitter starting at 1e-10 * trace/N is added
// and grown tenfold up to 1e-4 * trace/N before giving up.
class SpdSolver {
public:
    explicit SpdSolver(const Matrix& a);

    [[nodiscard]] Matrix solve(const Matrix& rhs) const { return llt_.solve(rhs); }
    [[nodiscard]] double jitter() const { return jitter_; }

private:
    Eigen::LLT<Matrix> llt_;
    double jitter_ = 0.0;
};

}  // namespace kresid
