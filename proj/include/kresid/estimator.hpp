#pragma once

#include "kresid/core.hpp"
#include "kresid/crossfit.hpp"
#include "kresid/kernels.hpp"

#include <optional>

namespace kresid {

enum class Direction { forward, swapped };

// Cached Gram quantities for the cross-fitted one-step estimator. Every
// r-term for a fold pair (k1, k2) is a |fold k1| x |fold k2| matrix whose
// rows and columns follow plan.members(k1) and plan.members(k2).
class GramStore {
public:
    // `k` must be resolved; the residual kernel comes from `nuisance`.
    GramStore(const Dataset& data, const FoldNuisance& nuisance, const KernelSpec& k);

    [[nodiscard]] const FoldPlan& plan() const { return nuisance_.plan; }
    [[nodiscard]] const Matrix& x_gram() const { return kx_; }

    // l(R^{k1}_a, R^{k2}_b) over all rows a, b.
    [[nodiscard]] Matrix residual_gram(int k1, int k2) const;

    [[nodiscard]] Matrix r_x(int k1, int k2) const;
    [[nodiscard]] Matrix r_xi(int k1, int k2) const;
    // forward: <phi(xi^{k1}(z1)) - mu^{k1}, sum_j xi_j^{k2}(z2) v_j^{k2}(w2)>;
    // swapped: the same term with the roles of the two observations exchanged.
    [[nodiscard]] Matrix r_xi_v(int k1, int k2, Direction dir) const;
    [[nodiscard]] Matrix r_v(int k1, int k2) const;

    [[nodiscard]] Matrix gram_block(int k1, int k2) const;

    // G(i, j) for all rows in dataset order; blocks below the fold diagonal
    // are mirrored from the blocks above it.
    [[nodiscard]] const Matrix& gram() const { return g_; }

private:
    [[nodiscard]] Matrix cross_term(int k1, int k2) const;
    [[nodiscard]] const FoldFit& fit(int k) const { return nuisance_.fold(k); }
    void assemble();

    FoldNuisance nuisance_;
    Matrix kx_;
    Matrix g_;
};

// Four-term centering shared by the X and residual kernel terms:
// A(V1, V2) - mean_{C1} A(., V2) - mean_{C2} A(V1, .) + mean_{C1 x C2} A.
Matrix center_block(const Matrix& a, const std::vector<Index>& v1, const std::vector<Index>& v2,
                    const std::vector<Index>& c1, const std::vector<Index>& c2);

// (1 / (n_k1 n_k2)) sum over fold k1 x fold k2 of N_a N_b G(a, b); empty
// multiplicities mean N = 1.
double fold_pair_inner(const Matrix& g, const FoldPlan& plan, int k1, int k2,
                       const std::vector<int>& mult1 = {}, const std::vector<int>& mult2 = {});

double v_statistic(const Matrix& g);
double u_statistic(const Matrix& g);

struct CrossFitStatistics {
    double q_v = 0.0;
    double q_u = 0.0;
    Matrix pair_inner;  // K x K
    double diagonal_sum = 0.0;
};

CrossFitStatistics cross_fit_statistics(const Matrix& g, const FoldPlan& plan);

}  // namespace kresid
