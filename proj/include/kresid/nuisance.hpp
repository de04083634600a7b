#pragma once

#include "kresid/core.hpp"
#include "kresid/kernels.hpp"

#include <cstdint>
#include <span>

namespace kresid {

// Kernel ridge regression m(w) = q(w, W_train) alpha + label mean, where
// (Q + N lambda I) alpha = Y - mean(Y).
struct RidgeFit {
    Matrix train_inputs;       // N x d_w
    Matrix dual_coefficients;  // N x d_y
    KernelSpec kernel = KernelSpec::gaussian(1);  // resolved
    double lambda = 0.0;
    RowVector label_mean;  // d_y

    [[nodiscard]] Matrix predict(const Matrix& w_eval) const;
};

RidgeFit fit_krr(const Matrix& w_train, const Matrix& y_train, const KernelSpec& q, double lambda);

// Scalar representer weights of vector-valued KRR with kernel q(.,.) Id:
// slices[j](t, e) is the weight of training target t in the prediction at
// evaluation point e for output coordinate j. With `centered` the weights
// belong to the regression on mean-centered targets with the mean added
// back, so every column sums to one.
struct VvkrrWeights {
    std::vector<Matrix> slices;  // d_y of N_train x N_eval
    bool centered = true;
    Vector lambdas;

    [[nodiscard]] const Matrix& slice(int j) const { return slices[static_cast<std::size_t>(j)]; }
    [[nodiscard]] int output_dim() const { return static_cast<int>(slices.size()); }
};

// `q` must be resolved or will be resolved on `w_train`.
VvkrrWeights fit_vvkrr_weights(const Matrix& w_train, const Matrix& w_eval, const KernelSpec& q,
                               std::span<const double> lambdas, bool centered);

// Ridge weights for a single lambda: (Q + N lambda I)^{-1} q(W_train, W_eval),
// optionally with the centering correction applied.
Matrix ridge_weights(const Matrix& gram_train, const Matrix& cross_gram, double lambda, bool centered);

// {1e-6, ..., 1e0} / n_train
std::vector<double> default_lambda_grid(Index n_train);

struct HyperparamChoice {
    double lambda = 0.0;
    KernelSpec kernel = KernelSpec::gaussian(1);  // q with its bandwidth resolved
    std::vector<double> cv_errors;                // one per grid element
};

// Internal 2-fold cross-validation over `grid`; the split is a seeded random
// halving of the rows. Ties go to the larger lambda.
HyperparamChoice select_hyperparams(const Matrix& w, const Matrix& targets, const KernelSpec& q,
                                    std::span<const double> grid, std::uint64_t seed, bool centered = true);

// Same selection for targets living in a feature space, described only by
// their Gram matrix target_gram(s, t) = <S_s, S_t>.
HyperparamChoice select_hyperparams_gram(const Matrix& w, const Matrix& target_gram, const KernelSpec& q,
                                         std::span<const double> grid, std::uint64_t seed, bool centered = true);

}  // namespace kresid
