#pragma once

#include "kresid/core.hpp"
#include "kresid/crossfit.hpp"
#include "kresid/kernels.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <variant>

namespace kresid {

inline constexpr int fourier_terms = 20;

struct FourierAnmConfig {
    double s_m = 1.0;
    double s_eps = 0.75;
    double rho = 0.0;
    double sigma0 = 0.35;
    Index n = 250;
    std::uint64_t seed = 0;
};

// Y = m(X) + sigma(X) Z, X ~ Unif[-3, 3], W = X. The random coefficients and
// the normalizing constants are fixed at construction.
class FourierAnm {
public:
    explicit FourierAnm(const FourierAnmConfig& cfg);

    [[nodiscard]] double mean(double x) const;
    [[nodiscard]] double noise_scale(double x) const;
    [[nodiscard]] double c_m() const { return c_m_; }
    [[nodiscard]] double c_eps() const { return c_eps_; }
    [[nodiscard]] const FourierAnmConfig& config() const { return cfg_; }

private:
    FourierAnmConfig cfg_;
    // c_k e^{i phi_k} k^{-s}, already multiplied by the normalizing constant
    std::array<std::complex<double>, fourier_terms> mean_coef_{}, scale_coef_{};
    double c_m_ = 1.0, c_eps_ = 1.0;
};

enum class GroupArm { null, alternative };

struct CovariateGroupConfig {
    Index n = 120;
    GroupArm arm = GroupArm::null;
    bool balanced = false;  // exactly n/2 rows per group instead of Bernoulli draws
    std::uint64_t seed = 0;
};

// X in {0, 1}, T ~ Unif[-pi, pi], W = (X, T), Y = m(X, T) + sigma(X) eps.
class CovariateGroups {
public:
    explicit CovariateGroups(const CovariateGroupConfig& cfg) : cfg_(cfg) {}

    static double mean(double x, double t);
    [[nodiscard]] double noise_scale(double x) const;
    [[nodiscard]] const CovariateGroupConfig& config() const { return cfg_; }

private:
    CovariateGroupConfig cfg_;
};

struct CausalPairConfig {
    double rho = 0.0;
    Index n = 250;
    std::uint64_t seed = 0;
};

// X ~ Unif[-3, 3], Y = m(X) + sigma(X) eps.
class CausalPair {
public:
    explicit CausalPair(const CausalPairConfig& cfg);

    static double mean(double x);
    static double h(double x);
    [[nodiscard]] double noise_scale(double x) const;
    [[nodiscard]] double h_mean() const { return h_mean_; }
    [[nodiscard]] double c() const { return c_; }
    [[nodiscard]] const CausalPairConfig& config() const { return cfg_; }

private:
    CausalPairConfig cfg_;
    double h_mean_ = 0.0, c_ = 1.0;
};

using Model = std::variant<FourierAnm, CovariateGroups, CausalPair>;

// Draw n rows; `seed` keys the sample stream (model coefficients are fixed).
Dataset sample(const Model& model, Index n, std::uint64_t seed);
// m(W) for every row of W.
Matrix true_mean(const Model& model, const Matrix& w);
// True when the residual is independent of X by construction.
bool known_null(const Model& model);
// Kernel on X used by the experiments: discrete for groups, gaussian otherwise.
KernelSpec default_x_kernel(const Model& model);

Dataset gen_fourier_anm(const FourierAnmConfig& cfg);
Dataset gen_covariate_groups(const CovariateGroupConfig& cfg);

struct CausalPairData {
    Dataset forward, reversed;
};
CausalPairData gen_causal_pair(const CausalPairConfig& cfg);
Dataset reverse(const Dataset& data);

// Mean and variance of f over `points` midpoints of [lo, hi].
std::pair<double, double> grid_moments(double lo, double hi, Index points, const auto& f) {
    CompensatedSum s, s2;
    const double step = (hi - lo) / static_cast<double>(points);
    for (Index i = 0; i < points; ++i) {
        const double v = f(lo + (static_cast<double>(i) + 0.5) * step);
        s.add(v);
        s2.add(v * v);
    }
    const double mean = s.value() / static_cast<double>(points);
    return {mean, s2.value() / static_cast<double>(points) - mean * mean};
}

struct OracleOptions {
    Index samples = 200000;
    Index block = 256;
    Index bandwidth_subsample = 2000;
    bool exact_null = true;  // return 0 for known nulls without sampling
    std::uint64_t seed = 0;
};

struct OracleSignal {
    double hsic = 0.0;        // estimate of the squared norm
    double norm = 0.0;        // sqrt(max(hsic, 0))
    double std_error = 0.0;   // of hsic
    double x_bandwidth = 0.0, residual_bandwidth = 0.0;
};

// Block-averaged unbiased HSIC between X and the true residual Y - m(W).
OracleSignal oracle_signal(const Model& model, const OracleOptions& opts);

// Unbiased HSIC of one block of Gram matrices.
double hsic_unbiased(const Matrix& k_gram, const Matrix& l_gram);

struct BlockEstimate {
    double value = 0.0, std_error = 0.0;
};

// Block-averaged unbiased HSIC and MMD^2 between the two groups of a 0/1
// coded X, using the residual kernel `l` on `residuals`.
BlockEstimate block_hsic(const KernelSpec& k, const Matrix& x, const KernelSpec& l, const Matrix& residuals,
                         Index block);
BlockEstimate block_mmd_sq(const Matrix& x, const KernelSpec& l, const Matrix& residuals, Index block);

}  // namespace kresid
