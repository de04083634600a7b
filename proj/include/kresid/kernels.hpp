#pragma once

#include "kresid/core.hpp"

#include <optional>
#include <string>

namespace kresid {

enum class KernelFamily { gaussian, matern, discrete };

// Only half-integer orders with closed-form derivatives; both exceed 2, which
// keeps the mixed second derivative bounded.
enum class MaternOrder { five_halves, seven_halves };

struct BandwidthRule {
    enum class Kind { median, fixed };
    Kind kind = Kind::median;
    double value = 0.0;

    static BandwidthRule median() { return {}; }
    static BandwidthRule fixed(double v) { return {Kind::fixed, v}; }

    friend bool operator==(const BandwidthRule&, const BandwidthRule&) = default;
};

class KernelSpec {
public:
    static KernelSpec gaussian(int dimension, BandwidthRule rule = BandwidthRule::median());
    static KernelSpec matern(int dimension, MaternOrder order, BandwidthRule rule = BandwidthRule::median());
    // 1{u == v} after rounding each coordinate to 12 significant digits.
    static KernelSpec discrete(int dimension);

    [[nodiscard]] KernelFamily family() const { return family_; }
    [[nodiscard]] MaternOrder order() const { return order_; }
    [[nodiscard]] int dimension() const { return dimension_; }
    [[nodiscard]] const BandwidthRule& rule() const { return rule_; }

    // True when the kernel can be evaluated: a fixed bandwidth or no bandwidth at all.
    [[nodiscard]] bool resolved() const;
    [[nodiscard]] bool differentiable() const { return family_ != KernelFamily::discrete; }
    // Throws for unresolved or discrete kernels.
    [[nodiscard]] double bandwidth() const;

    [[nodiscard]] KernelSpec with_bandwidth(double value) const;
    [[nodiscard]] KernelSpec with_dimension(int dimension) const;

    [[nodiscard]] std::string describe() const;

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

private:
    KernelSpec() = default;

    KernelFamily family_ = KernelFamily::gaussian;
    MaternOrder order_ = MaternOrder::five_halves;
    int dimension_ = 1;
    BandwidthRule rule_{};
};

// Parse "gaussian", "matern52", "matern72", "discrete", optionally followed by
// ":<bandwidth>" for a fixed bandwidth (e.g. "gaussian:0.5").
KernelSpec parse_kernel(const std::string& text, int dimension);

// Median of the n(n-1)/2 pairwise Euclidean distances between rows.
double median_pairwise_distance(const Matrix& points);

// Bandwidth under the rule of `spec`: the stored value for fixed rules, the
// median pairwise distance otherwise. Throws "degenerate bandwidth" when all
// points coincide.
double resolve_bandwidth(const KernelSpec& spec, const Matrix& points);

// Copy of `spec` with its bandwidth resolved on `points`; discrete kernels and
// fixed rules pass through unchanged.
KernelSpec resolve(const KernelSpec& spec, const Matrix& points);

double kernel_value(const KernelSpec& spec, const RowVector& u, const RowVector& v);

// (i, j) -> k(A_i, B_j)
Matrix eval_gram(const KernelSpec& spec, const Matrix& a, const Matrix& b);

// [j](i, i') -> derivative of k(A_i, B_i') in coordinate j of the first argument.
Tensor3 eval_grad_gram(const KernelSpec& spec, const Matrix& a, const Matrix& b);

// (j, r)(i, i') -> d^2 k / d(first arg)_j d(second arg)_r at (A_i, B_i').
Tensor4 eval_mixed_gram(const KernelSpec& spec, const Matrix& a, const Matrix& b);

// Only the (j, j) slice of the mixed tensor.
Matrix eval_mixed_gram_diagonal(const KernelSpec& spec, const Matrix& a, const Matrix& b, int j);

}  // namespace kresid
