#include "kresid/nuisance.hpp"

#include "kresid/linalg.hpp"
#include "kresid/rng.hpp"

#include <algorithm>
#include <numeric>

namespace kresid {

Matrix RidgeFit::predict(const Matrix& w_eval) const {
    Matrix out = eval_gram(kernel, w_eval, train_inputs) * dual_coefficients;
    out.rowwise() += label_mean;
    return out;
}

RidgeFit fit_krr(const Matrix& w_train, const Matrix& y_train, const KernelSpec& q, double lambda) {
    const Index n = w_train.rows();
    if (n < 2) throw Error("fit_krr needs at least two training rows");
    if (y_train.rows() != n) throw Error("fit_krr: row count mismatch between inputs and labels");
    if (!(lambda > 0.0)) throw Error("ridge parameter must be positive");
    RidgeFit fit;
    fit.kernel = resolve(q, w_train);
    fit.lambda = lambda;
    fit.train_inputs = w_train;
    fit.label_mean = y_train.colwise().mean();
    Matrix a = eval_gram(fit.kernel, w_train, w_train);
    a.diagonal().array() += static_cast<double>(n) * lambda;
    const SpdSolver solver(a);
    fit.dual_coefficients = solver.solve(y_train.rowwise() - fit.label_mean);
    return fit;
}

Matrix ridge_weights(const Matrix& gram_train, const Matrix& cross_gram, double lambda, bool centered) {
    if (!(lambda > 0.0)) throw Error("ridge parameter must be positive");
    const Index n = gram_train.rows();
    Matrix a = gram_train;
    a.diagonal().array() += static_cast<double>(n) * lambda;
    const SpdSolver solver(a);
    Matrix w = solver.solve(cross_gram);
    if (centered) {
        const RowVector shift = (1.0 - w.colwise().sum().array()) / static_cast<double>(n);
        w.rowwise() += shift;
    }
    return w;
}

VvkrrWeights fit_vvkrr_weights(const Matrix& w_train, const Matrix& w_eval, const KernelSpec& q,
                               std::span<const double> lambdas, bool centered) {
    if (w_train.rows() < 1) throw Error("vvKRR needs training rows");
    if (lambdas.empty()) throw Error("vvKRR needs at least one output coordinate");
    for (double l : lambdas)
        if (!(l > 0.0)) throw Error("ridge parameter must be positive");
    const KernelSpec k = q.resolved() ? q : resolve(q, w_train);
    const Matrix gram = eval_gram(k, w_train, w_train);
    const Matrix cross = eval_gram(k, w_train, w_eval);
    VvkrrWeights out;
    out.centered = centered;
    out.lambdas = Eigen::Map<const Vector>(lambdas.data(), static_cast<Index>(lambdas.size()));
    out.slices.reserve(lambdas.size());
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        std::size_t same = j;
        for (std::size_t p = 0; p < j; ++p)
            if (lambdas[p] == lambdas[j]) {
                same = p;
                break;
            }
        if (same != j)
            out.slices.push_back(out.slices[same]);
        else
            out.slices.push_back(ridge_weights(gram, cross, lambdas[j], centered));
    }
    return out;
}

std::vector<double> default_lambda_grid(Index n_train) {
    if (n_train < 1) throw Error("lambda grid needs a positive sample size");
    std::vector<double> grid;
    for (int e = -6; e <= 0; ++e) grid.push_back(std::pow(10.0, e) / static_cast<double>(n_train));
    return grid;
}

namespace {

struct Halves {
    std::vector<Index> a, b;
};

Halves split_halves(Index n, std::uint64_t seed) {
    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Index{0});
    CounterRng rng(seed, StreamTag::cv_split);
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto half = idx.begin() + static_cast<std::ptrdiff_t>(n / 2);
    Halves h{{idx.begin(), half}, {half, idx.end()}};
    std::sort(h.a.begin(), h.a.end());
    std::sort(h.b.begin(), h.b.end());
    return h;
}

// loss(train, test, weights) -> summed squared error on the test rows.
template <class Loss>
HyperparamChoice select_with(const Matrix& w, const KernelSpec& q, std::span<const double> grid, std::uint64_t seed,
                             bool centered, Loss loss) {
    if (grid.empty()) throw Error("hyperparameter grid is empty");
    const Index n = w.rows();
    if (n < 4) throw Error("cross-validation needs at least four rows");
    HyperparamChoice choice;
    choice.kernel = resolve(q, w);
    if (grid.size() == 1) {
        choice.lambda = grid[0];
        choice.cv_errors.assign(1, 0.0);
        return choice;
    }
    const Matrix gram = eval_gram(choice.kernel, w, w);
    const Halves h = split_halves(n, seed);
    const std::pair<const std::vector<Index>*, const std::vector<Index>*> rounds[2] = {{&h.a, &h.b}, {&h.b, &h.a}};
    choice.cv_errors.assign(grid.size(), 0.0);
    for (const auto& [train, test] : rounds) {
        const Matrix g_tt = gram(*train, *train);
        const Matrix g_te = gram(*train, *test);
        for (std::size_t g = 0; g < grid.size(); ++g)
            choice.cv_errors[g] += loss(*train, *test, ridge_weights(g_tt, g_te, grid[g], centered));
    }
    std::size_t best = 0;
    for (std::size_t g = 1; g < grid.size(); ++g) {
        const double e = choice.cv_errors[g], b = choice.cv_errors[best];
        const double tol = 1e-12 * std::max(std::abs(e), std::abs(b));
        if (e < b - tol || (std::abs(e - b) <= tol && grid[g] > grid[best])) best = g;
    }
    choice.lambda = grid[best];
    return choice;
}

}  // namespace

HyperparamChoice select_hyperparams(const Matrix& w, const Matrix& targets, const KernelSpec& q,
                                    std::span<const double> grid, std::uint64_t seed, bool centered) {
    if (targets.rows() != w.rows()) throw Error("select_hyperparams: row count mismatch");
    return select_with(w, q, grid, seed, centered,
                       [&](const std::vector<Index>& train, const std::vector<Index>& test, const Matrix& weights) {
                           const Matrix pred = weights.transpose() * select_rows(targets, train);
                           return (select_rows(targets, test) - pred).squaredNorm();
                       });
}

HyperparamChoice select_hyperparams_gram(const Matrix& w, const Matrix& target_gram, const KernelSpec& q,
                                         std::span<const double> grid, std::uint64_t seed, bool centered) {
    if (target_gram.rows() != w.rows() || target_gram.cols() != w.rows())
        throw Error("select_hyperparams_gram: target Gram must be n x n");
    return select_with(w, q, grid, seed, centered,
                       [&](const std::vector<Index>& train, const std::vector<Index>& test, const Matrix& weights) {
                           const Matrix t_tt = target_gram(train, train);
                           const Matrix t_te = target_gram(train, test);
                           double err = 0.0;
                           for (std::size_t v = 0; v < test.size(); ++v) err += target_gram(test[v], test[v]);
                           err -= 2.0 * weights.cwiseProduct(t_te).sum();
                           err += weights.cwiseProduct(t_tt * weights).sum();
                           return err;
                       });
}

}  // namespace kresid
