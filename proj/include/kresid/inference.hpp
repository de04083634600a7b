#pragma once

#include "kresid/core.hpp"
#include "kresid/crossfit.hpp"

#include <cstdint>
#include <optional>

namespace kresid {

struct Interval {
    double lo = 0.0, hi = 0.0;

    [[nodiscard]] bool contains(double v) const { return lo <= v && v <= hi; }
    [[nodiscard]] double width() const { return hi - lo; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

// A closed interval, optionally joined with the point {0}.
struct UnionSet {
    Interval interval;
    bool with_zero = false;

    [[nodiscard]] bool contains(double v) const { return interval.contains(v) || (with_zero && v == 0.0); }
    friend bool operator==(const UnionSet&, const UnionSet&) = default;
};

// Within-fold multinomial multiplicities of bootstrap draw `draw`, indexed by row.
std::vector<int> bootstrap_multiplicities(const FoldPlan& plan, std::uint64_t seed, std::uint64_t draw);

// n^{-1} (N - 1)^T G (N - 1)
double bootstrap_statistic(const Matrix& g, const std::vector<int>& multiplicities);

struct BootstrapOptions {
    int draws = 1000;
    std::uint64_t seed = 0;
    bool allow_few_draws = false;  // permit draws < 100
};

std::vector<double> bootstrap_draws(const Matrix& g, const FoldPlan& plan, const BootstrapOptions& opts);

// ceil((1 - alpha) B)-th order statistic of the draws.
double bootstrap_quantile(std::vector<double> draws, double alpha);

Interval triangle_ci(double q_v, double zeta, Index n);

// Fold-weighted mean of squared row means minus the squared grand mean,
// before clamping; see sigma_hat_sq for the clamped value.
double sigma_hat_sq_raw(const Matrix& g, const FoldPlan& plan);
double sigma_hat_sq(const Matrix& g, const FoldPlan& plan);

double normal_quantile(double p);

Interval delta_ci(double q_u, double sigma_sq, Index n, double alpha);
UnionSet union_ci(const Interval& delta, const Interval& triangle);

// Empty when sigma is zero: the ratio is undefined and the delta interval
// should not be trusted.
std::optional<double> diagnostic_ratio(double zeta, double sigma_sq, Index n, double beta);

struct TestDecision {
    bool reject = false;
    double p_value = 1.0;  // fraction of draws at or above n Q_V
};

TestDecision hsic_test(double q_v, double zeta, Index n, const std::vector<double>& draws);

struct InferenceOptions {
    double alpha = 0.05;
    double beta = 0.05;
    BootstrapOptions bootstrap;
};

struct InferenceReport {
    double q_v = 0.0, q_u = 0.0;
    double zeta = 0.0;
    double sigma_sq = 0.0;
    Interval triangle, delta;
    UnionSet union_set;
    std::optional<double> diagnostic;
    bool reject = false;
    double p_value = 1.0;
    double alpha = 0.05, beta = 0.05;
    int draws = 0;
    Index n = 0;
    int folds = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const InferenceReport&, const InferenceReport&) = default;
};

InferenceReport infer(const Matrix& g, const FoldPlan& plan, const InferenceOptions& opts);

}  // namespace kresid
