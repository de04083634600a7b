#pragma once

#include "kresid/crossfit.hpp"
#include "kresid/estimator.hpp"
#include "kresid/inference.hpp"

#include <cstdint>

namespace kresid {

struct PipelineConfig {
    int folds = 5;
    KernelSpec x_kernel = KernelSpec::gaussian(1);  // dimension reset to d_x
    NuisanceConfig nuisance;
    InferenceOptions inference;
    std::uint64_t seed = 0;  // keys folds, cross-validation splits and bootstrap draws
};

struct PipelineResult {
    InferenceReport report;
    CrossFitStatistics statistics;
    std::vector<int> fold_assignment;
    double x_bandwidth = 0.0;  // 0 for the discrete kernel
    double residual_bandwidth = 0.0;
    std::vector<double> lambda_m, lambda_v;  // per fold
};

// folds -> nuisances -> Gram entries -> statistics -> bootstrap inference
PipelineResult run_debiased_test(const Dataset& data, const PipelineConfig& cfg);

enum class ArrowVerdict { forward, reverse, both_rejected, undecided };

const char* verdict_name(ArrowVerdict v);
ArrowVerdict arrow_verdict(bool forward_rejected, bool reverse_rejected);

struct ArrowResult {
    PipelineResult forward, reverse;
    ArrowVerdict verdict = ArrowVerdict::undecided;
};

// Goodness-of-fit of the additive noise model in both directions.
ArrowResult run_arrow(const Dataset& forward, const PipelineConfig& cfg);

}  // namespace kresid
