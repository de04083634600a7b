#include "kresid/linalg.hpp"

#include <cmath>

namespace kresid {

Matrix select_rows(const Matrix& m, const std::vector<Index>& rows) {
    Matrix out(static_cast<Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
    return out;
}

namespace {

bool factorization_ok(const Eigen::LLT<Matrix>& llt) {
    if (llt.info() != Eigen::Success) return false;
    const auto diag = llt.matrixLLT().diagonal();
    return diag.allFinite() && (diag.array() > 0.0).all();
}

}  // namespace

SpdSolver::SpdSolver(const Matrix& a) {
    if (a.rows() != a.cols() || a.rows() == 0) throw Error("SpdSolver: matrix must be square and non-empty");
    if (!a.allFinite()) throw Error("SpdSolver: non-finite entries");
    llt_.compute(a);
    if (factorization_ok(llt_)) return;

    const double n = static_cast<double>(a.rows());
    const double scale = std::abs(a.trace()) / n;
    for (double rel = 1e-10; rel <= 1e-4 * (1.0 + 1e-12); rel *= 10.0) {
        jitter_ = rel * scale;
        Matrix shifted = a;
        shifted.diagonal().array() += jitter_;
        llt_.compute(shifted);
        if (factorization_ok(llt_)) return;
    }
    throw Error("SpdSolver: regularized system is singular even after jitter escalation");
}

}  // namespace kresid
