#pragma once

#include "kresid/core.hpp"
#include "kresid/crossfit.hpp"

#include <cstdint>

namespace kresid {

struct PermutationResult {
    double observed = 0.0;
    std::vector<double> permuted;
    double p_value = 1.0;  // (1 + #{permuted >= observed}) / (B + 1)
    bool reject = false;
};

// Biased HSIC n^{-2} tr(HKH HLH).
double plugin_hsic_stat(const Matrix& k_gram, const Matrix& l_gram);

// Permutes the rows and columns of L jointly; both Grams are centered once.
PermutationResult permutation_test(const Matrix& k_gram, const Matrix& l_gram, int permutations, double alpha,
                                   std::uint64_t seed);

struct BaselineConfig {
    KernelSpec x_kernel = KernelSpec::gaussian(1);  // dimension reset to d_x
    NuisanceConfig nuisance;
    int permutations = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 0;
};

// Fit on a random train_fraction of the rows, test on the rest.
PermutationResult split_fit_test(const Dataset& data, double train_fraction, const BaselineConfig& cfg);

// Out-of-fold residuals for every row, then one full-sample permutation test.
PermutationResult crossfit_permutation_test(const Dataset& data, const FoldPlan& plan, const BaselineConfig& cfg);

// Residual of each row under the fold regression that did not see it.
Matrix out_of_fold_residuals(const Dataset& data, const FoldPlan& plan, const NuisanceConfig& cfg);

}  // namespace kresid
