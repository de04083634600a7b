#include "kresid/baselines.hpp"

#include "kresid/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kresid {

namespace {

Matrix double_center(const Matrix& a) {
    Matrix c = a;
    c.rowwise() -= a.colwise().mean();
    c.colwise() -= c.rowwise().mean();
    return c;
}

}  // namespace

double plugin_hsic_stat(const Matrix& k_gram, const Matrix& l_gram) {
    if (k_gram.rows() != k_gram.cols() || l_gram.rows() != l_gram.cols() || k_gram.rows() != l_gram.rows())
        throw Error("plugin_hsic_stat: Gram matrices must be square and of equal size");
    const auto n = static_cast<double>(k_gram.rows());
    return double_center(k_gram).cwiseProduct(double_center(l_gram).transpose()).sum() / (n * n);
}

PermutationResult permutation_test(const Matrix& k_gram, const Matrix& l_gram, int permutations, double alpha,
                                   std::uint64_t seed) {
    if (permutations < 1) throw Error("permutation test needs at least one permutation");
    const Matrix kc = double_center(k_gram);
    const Matrix lc = double_center(l_gram);
    const Index n = kc.rows();
    if (lc.rows() != n) throw Error("permutation_test: Gram sizes differ");
    const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
    PermutationResult r;
    r.observed = kc.cwiseProduct(lc.transpose()).sum() * scale;
    r.permuted.resize(static_cast<std::size_t>(permutations));
#pragma omp parallel for schedule(static)
    for (int b = 0; b < permutations; ++b) {
        std::vector<Index> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), Index{0});
        CounterRng rng(seed, StreamTag::permutation, static_cast<std::uint64_t>(b));
        std::shuffle(perm.begin(), perm.end(), rng);
        double s = 0.0;
        for (Index j = 0; j < n; ++j) {
            const Index pj = perm[static_cast<std::size_t>(j)];
            for (Index i = 0; i < n; ++i) s += kc(i, j) * lc(pj, perm[static_cast<std::size_t>(i)]);
        }
        r.permuted[static_cast<std::size_t>(b)] = s * scale;
    }
    const auto hits = std::count_if(r.permuted.begin(), r.permuted.end(), [&](double v) { return v >= r.observed; });
    r.p_value = (1.0 + static_cast<double>(hits)) / (permutations + 1.0);
    r.reject = r.p_value <= alpha;
    return r;
}

namespace {

PermutationResult residual_test(const Matrix& x, const Matrix& residuals, const BaselineConfig& cfg) {
    const KernelSpec k = resolve(cfg.x_kernel.with_dimension(static_cast<int>(x.cols())), x);
    const KernelSpec l = resolve(cfg.nuisance.l.with_dimension(static_cast<int>(residuals.cols())), residuals);
    return permutation_test(eval_gram(k, x, x), eval_gram(l, residuals, residuals), cfg.permutations, cfg.alpha,
                            cfg.seed);
}

}  // namespace

PermutationResult split_fit_test(const Dataset& data, double train_fraction, const BaselineConfig& cfg) {
    data.validate();
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw Error("train fraction must lie in (0, 1)");
    const Index n = data.n();
    const auto n_train = static_cast<Index>(std::llround(train_fraction * static_cast<double>(n)));
    if (n_train < 10 || n - n_train < 10) throw Error("split too small: both parts need at least 10 rows");
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    CounterRng rng(cfg.seed, StreamTag::train_test_split);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Index> train(order.begin(), order.begin() + n_train), test(order.begin() + n_train, order.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());

    const Matrix wt = select_rows(data.w, train), yt = select_rows(data.y, train);
    const KernelSpec q = cfg.nuisance.q.with_dimension(data.dw());
    RidgeFit fit;
    if (cfg.nuisance.lambda_m) {
        fit = fit_krr(wt, yt, q, *cfg.nuisance.lambda_m);
    } else {
        const auto grid = cfg.nuisance.grid.empty() ? default_lambda_grid(n_train) : cfg.nuisance.grid;
        const HyperparamChoice choice =
            select_hyperparams(wt, yt, q, grid, derive_seed(cfg.nuisance.seed, StreamTag::cv_split, 0));
        fit = fit_krr(wt, yt, choice.kernel, choice.lambda);
    }
    const Matrix w_test = select_rows(data.w, test);
    const Matrix residuals = select_rows(data.y, test) - fit.predict(w_test);
    return residual_test(select_rows(data.x, test), residuals, cfg);
}

Matrix out_of_fold_residuals(const Dataset& data, const FoldPlan& plan, const NuisanceConfig& cfg) {
    const auto fits = fit_fold_regressions(data, plan, cfg);
    Matrix out(data.n(), data.dy());
    for (int k = 0; k < plan.folds(); ++k) {
        const Matrix resid = data.y - fits[static_cast<std::size_t>(k)].predict(data.w);
        for (Index i : plan.members(k)) out.row(i) = resid.row(i);
    }
    return out;
}

PermutationResult crossfit_permutation_test(const Dataset& data, const FoldPlan& plan, const BaselineConfig& cfg) {
    return residual_test(data.x, out_of_fold_residuals(data, plan, cfg.nuisance), cfg);
}

}  // namespace kresid
