#pragma once

#include "kresid/core.hpp"
#include "kresid/kernels.hpp"
#include "kresid/nuisance.hpp"

#include <cstdint>
#include <optional>

namespace kresid {

// Observations (x_i, w_i, y_i). `projection` lists, for each column of X, the
// column of W it copies; empty means the caller vouches for x = pi(w).
struct Dataset {
    Matrix x, w, y;
    std::vector<int> projection;

    [[nodiscard]] Index n() const { return y.rows(); }
    [[nodiscard]] int dx() const { return static_cast<int>(x.cols()); }
    [[nodiscard]] int dw() const { return static_cast<int>(w.cols()); }
    [[nodiscard]] int dy() const { return static_cast<int>(y.cols()); }

    void validate() const;
};

class FoldPlan {
public:
    FoldPlan(int folds, std::vector<int> assignment, std::uint64_t seed = 0);

    [[nodiscard]] int folds() const { return folds_; }
    [[nodiscard]] Index n() const { return static_cast<Index>(assignment_.size()); }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] int fold_of(Index i) const { return assignment_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] const std::vector<int>& assignment() const { return assignment_; }
    // Sorted row indices inside / outside fold k.
    [[nodiscard]] const std::vector<Index>& members(int k) const { return members_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] const std::vector<Index>& complement(int k) const {
        return complements_[static_cast<std::size_t>(k)];
    }
    [[nodiscard]] Index size(int k) const { return static_cast<Index>(members(k).size()); }

private:
    int folds_;
    std::vector<int> assignment_;
    std::uint64_t seed_;
    std::vector<std::vector<Index>> members_, complements_;
};

// Random balanced partition: rows are shuffled and dealt round-robin.
FoldPlan make_folds(Index n, int folds, std::uint64_t seed);

struct NuisanceConfig {
    KernelSpec q = KernelSpec::matern(1, MaternOrder::five_halves);  // dimension reset to d_w
    KernelSpec l = KernelSpec::gaussian(1);                          // dimension reset to d_y
    std::vector<double> grid;  // empty means default_lambda_grid of the complement size
    std::optional<double> lambda_m, lambda_v;  // skip selection when set
    bool centered = true;
    std::uint64_t seed = 0;
};

struct FoldFit {
    Matrix predictions;     // n x d_y, m^{-k} at every row
    Matrix residuals;       // n x d_y, Y - predictions
    VvkrrWeights weights;   // d_y slices of (n - n_k) x n
    KernelSpec q = KernelSpec::gaussian(1);
    double lambda_m = 0.0, lambda_v = 0.0;
};

struct FoldNuisance {
    FoldPlan plan;
    KernelSpec l = KernelSpec::gaussian(1);  // resolved residual kernel
    std::vector<FoldFit> fits;

    [[nodiscard]] const FoldFit& fold(int k) const { return fits[static_cast<std::size_t>(k)]; }
    // Residual of row i under the model that did not see it.
    [[nodiscard]] Matrix out_of_fold_residuals() const;
};

FoldNuisance fit_fold_nuisances(const Dataset& data, const FoldPlan& plan, const NuisanceConfig& cfg);

// Only the regression stage: m^{-k} per fold, with predictions at all rows.
std::vector<RidgeFit> fit_fold_regressions(const Dataset& data, const FoldPlan& plan, const NuisanceConfig& cfg);

}  // namespace kresid
