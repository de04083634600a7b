#include "kresid/crossfit.hpp"

#include "kresid/rng.hpp"

#include <algorithm>
#include <numeric>

namespace kresid {

void Dataset::validate() const {
    const Index rows = y.rows();
    if (x.rows() != rows || w.rows() != rows)
        throw Error("dataset row counts differ: x " + std::to_string(x.rows()) + ", w " + std::to_string(w.rows()) +
                    ", y " + std::to_string(rows));
    if (x.cols() < 1 || w.cols() < 1 || y.cols() < 1) throw Error("dataset needs at least one x, w and y column");
    if (!x.allFinite() || !w.allFinite() || !y.allFinite()) throw Error("dataset contains non-finite values");
    if (!projection.empty()) {
        if (static_cast<Index>(projection.size()) != x.cols()) throw Error("projection must list one W column per X column");
        for (std::size_t c = 0; c < projection.size(); ++c) {
            const int src = projection[c];
            if (src < 0 || src >= w.cols()) throw Error("projection refers to a missing W column");
            if (x.col(static_cast<Index>(c)) != w.col(src)) throw Error("x is not the declared projection of w");
        }
    }
}

FoldPlan::FoldPlan(int folds, std::vector<int> assignment, std::uint64_t seed)
    : folds_(folds), assignment_(std::move(assignment)), seed_(seed) {
    if (folds_ < 2) throw Error("need at least two folds");
    members_.resize(static_cast<std::size_t>(folds_));
    complements_.resize(static_cast<std::size_t>(folds_));
    for (std::size_t i = 0; i < assignment_.size(); ++i) {
        const int k = assignment_[i];
        if (k < 0 || k >= folds_) throw Error("fold id out of range");
        for (int f = 0; f < folds_; ++f)
            (f == k ? members_ : complements_)[static_cast<std::size_t>(f)].push_back(static_cast<Index>(i));
    }
    for (const auto& m : members_)
        if (m.size() < 2) throw Error("every fold needs at least two rows");
}

FoldPlan make_folds(Index n, int folds, std::uint64_t seed) {
    if (folds < 2) throw Error("need at least two folds");
    if (n < 2 * static_cast<Index>(folds))
        throw Error("n = " + std::to_string(n) + " is too small for " + std::to_string(folds) + " folds");
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    CounterRng rng(seed, StreamTag::folds);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> assignment(static_cast<std::size_t>(n));
    for (std::size_t p = 0; p < order.size(); ++p)
        assignment[static_cast<std::size_t>(order[p])] = static_cast<int>(p % static_cast<std::size_t>(folds));
    return FoldPlan(folds, std::move(assignment), seed);
}

namespace {

std::vector<double> grid_for(const NuisanceConfig& cfg, Index n_train) {
    if (cfg.grid.empty()) return default_lambda_grid(n_train);
    return cfg.grid;
}

RidgeFit fit_regression(const Dataset& data, const FoldPlan& plan, const NuisanceConfig& cfg, int k) {
    const auto& comp = plan.complement(k);
    const Matrix wc = select_rows(data.w, comp);
    const Matrix yc = select_rows(data.y, comp);
    const KernelSpec q = cfg.q.with_dimension(data.dw());
    if (cfg.lambda_m) return fit_krr(wc, yc, q, *cfg.lambda_m);
    const auto grid = grid_for(cfg, wc.rows());
    const HyperparamChoice choice =
        select_hyperparams(wc, yc, q, grid, derive_seed(cfg.seed, StreamTag::cv_split, 2 * static_cast<unsigned>(k)));
    return fit_krr(wc, yc, choice.kernel, choice.lambda);
}

}  // namespace

std::vector<RidgeFit> fit_fold_regressions(const Dataset& data, const FoldPlan& plan, const NuisanceConfig& cfg) {
    data.validate();
    if (plan.n() != data.n()) throw Error("fold plan does not match the dataset size");
    std::vector<RidgeFit> fits(static_cast<std::size_t>(plan.folds()));
    for (int k = 0; k < plan.folds(); ++k) fits[static_cast<std::size_t>(k)] = fit_regression(data, plan, cfg, k);
    return fits;
}

Matrix FoldNuisance::out_of_fold_residuals() const {
    const Index n = plan.n();
    Matrix out(n, fits.front().residuals.cols());
    for (Index i = 0; i < n; ++i) out.row(i) = fold(plan.fold_of(i)).residuals.row(i);
    return out;
}

FoldNuisance fit_fold_nuisances(const Dataset& data, const FoldPlan& plan, const NuisanceConfig& cfg) {
    const auto regressions = fit_fold_regressions(data, plan, cfg);
    FoldNuisance out{plan, cfg.l.with_dimension(data.dy()), {}};
    out.fits.resize(regressions.size());
    for (std::size_t k = 0; k < regressions.size(); ++k) {
        FoldFit& f = out.fits[k];
        f.predictions = regressions[k].predict(data.w);
        f.residuals = data.y - f.predictions;
        f.q = regressions[k].kernel;
        f.lambda_m = regressions[k].lambda;
    }
    try {
        out.l = resolve(out.l, out.out_of_fold_residuals());
    } catch (const Error&) {
        // All residuals coincide, so every residual term vanishes whatever the bandwidth.
        out.l = out.l.with_bandwidth(1.0);
    }

    for (int k = 0; k < plan.folds(); ++k) {
        FoldFit& f = out.fits[static_cast<std::size_t>(k)];
        const auto& comp = plan.complement(k);
        const Matrix wc = select_rows(data.w, comp);
        if (cfg.lambda_v) {
            f.lambda_v = *cfg.lambda_v;
        } else {
            // Targets are the first-coordinate derivative features of the
            // residual kernel; their Gram is the mixed second derivative.
            const Matrix rc = select_rows(f.residuals, comp);
            const Matrix target = eval_mixed_gram_diagonal(out.l, rc, rc, 0);
            const auto grid = grid_for(cfg, wc.rows());
            f.lambda_v = select_hyperparams_gram(wc, target, f.q, grid,
                                                 derive_seed(cfg.seed, StreamTag::cv_split, 2 * static_cast<unsigned>(k) + 1),
                                                 cfg.centered)
                             .lambda;
        }
        const std::vector<double> lambdas(static_cast<std::size_t>(data.dy()), f.lambda_v);
        f.weights = fit_vvkrr_weights(wc, data.w, f.q, lambdas, cfg.centered);
    }
    return out;
}

}  // namespace kresid
