#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kresid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

// Rank-3 tensor stored as a list of matrix slices: slices[j](i, i').
using Tensor3 = std::vector<Matrix>;

// Rank-4 tensor with two small leading indices, slices(j, r)(i, i').
struct Tensor4 {
    int dim = 0;
    std::vector<Matrix> slices;

    Matrix& operator()(int j, int r) { return slices[static_cast<std::size_t>(j * dim + r)]; }
    const Matrix& operator()(int j, int r) const { return slices[static_cast<std::size_t>(j * dim + r)]; }
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Rows of `m` selected by `rows`, in order.
Matrix select_rows(const Matrix& m, const std::vector<Index>& rows);

}  // namespace kresid
