#include "kresid/inference.hpp"

#include "kresid/estimator.hpp"
#include "kresid/rng.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <random>

namespace kresid {

std::vector<int> bootstrap_multiplicities(const FoldPlan& plan, std::uint64_t seed, std::uint64_t draw) {
    std::vector<int> mult(static_cast<std::size_t>(plan.n()), 0);
    CounterRng rng(seed, StreamTag::bootstrap, draw);
    for (int k = 0; k < plan.folds(); ++k) {
        const auto& members = plan.members(k);
        std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
        for (std::size_t t = 0; t < members.size(); ++t) ++mult[static_cast<std::size_t>(members[pick(rng)])];
    }
    return mult;
}

double bootstrap_statistic(const Matrix& g, const std::vector<int>& multiplicities) {
    const Index n = g.rows();
    if (static_cast<Index>(multiplicities.size()) != n) throw Error("multiplicity vector length does not match n");
    Vector e(n);
    for (Index i = 0; i < n; ++i) e[i] = multiplicities[static_cast<std::size_t>(i)] - 1.0;
    return e.dot(g * e) / static_cast<double>(n);
}

std::vector<double> bootstrap_draws(const Matrix& g, const FoldPlan& plan, const BootstrapOptions& opts) {
    if (opts.draws < 1) throw Error("bootstrap needs at least one draw");
    if (opts.draws < 100 && !opts.allow_few_draws)
        throw Error("bootstrap with fewer than 100 draws is refused; pass the override to force it");
    std::vector<double> out(static_cast<std::size_t>(opts.draws));
#pragma omp parallel for schedule(static)
    for (int b = 0; b < opts.draws; ++b)
        out[static_cast<std::size_t>(b)] =
            bootstrap_statistic(g, bootstrap_multiplicities(plan, opts.seed, static_cast<std::uint64_t>(b)));
    return out;
}

double bootstrap_quantile(std::vector<double> draws, double alpha) {
    if (draws.empty()) throw Error("no bootstrap draws");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
    const double b = static_cast<double>(draws.size());
    auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * b - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, draws.size());
    const auto it = draws.begin() + static_cast<std::ptrdiff_t>(rank - 1);
    std::nth_element(draws.begin(), it, draws.end());
    return *it;
}

Interval triangle_ci(double q_v, double zeta, Index n) {
    const double center = std::sqrt(std::max(q_v, 0.0));
    const double radius = std::sqrt(std::max(zeta, 0.0) / static_cast<double>(n));
    return {std::max(center - radius, 0.0), center + radius};
}

double sigma_hat_sq_raw(const Matrix& g, const FoldPlan& plan) {
    const Index n = plan.n();
    if (g.rows() != n || g.cols() != n) throw Error("Gram matrix does not match the fold plan");
    const auto k = static_cast<double>(plan.folds());
    Vector s = Vector::Zero(n);
    for (Index c = 0; c < n; ++c) {
        CompensatedSum acc;
        for (int f = 0; f < plan.folds(); ++f) {
            CompensatedSum fold;
            for (Index o : plan.members(f)) fold.add(g(o, c));
            acc.add(fold.value() / static_cast<double>(plan.size(f)));
        }
        s[c] = acc.value() / k;
    }
    CompensatedSum mean, mean_sq;
    for (Index c = 0; c < n; ++c) {
        const double w = 1.0 / (k * static_cast<double>(plan.size(plan.fold_of(c))));
        mean.add(w * s[c]);
        mean_sq.add(w * s[c] * s[c]);
    }
    return mean_sq.value() - mean.value() * mean.value();
}

double sigma_hat_sq(const Matrix& g, const FoldPlan& plan) { return std::max(sigma_hat_sq_raw(g, plan), 0.0); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw Error("normal quantile needs p in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

Interval delta_ci(double q_u, double sigma_sq, Index n, double alpha) {
    const double half = 2.0 * normal_quantile(1.0 - alpha / 2.0) * std::sqrt(std::max(sigma_sq, 0.0) / static_cast<double>(n));
    return {q_u - half, q_u + half};
}

UnionSet union_ci(const Interval& delta, const Interval& triangle) {
    return {delta, triangle.contains(0.0) && !delta.contains(0.0)};
}

std::optional<double> diagnostic_ratio(double zeta, double sigma_sq, Index n, double beta) {
    if (!(sigma_sq > 0.0)) return std::nullopt;
    return zeta / (std::sqrt(static_cast<double>(n)) * 2.0 * std::sqrt(sigma_sq) * normal_quantile(1.0 - beta / 2.0));
}

TestDecision hsic_test(double q_v, double zeta, Index n, const std::vector<double>& draws) {
    const double stat = static_cast<double>(n) * q_v;
    TestDecision d;
    d.reject = stat > zeta;
    if (!draws.empty()) {
        const auto hits = std::count_if(draws.begin(), draws.end(), [&](double v) { return v >= stat; });
        d.p_value = static_cast<double>(hits) / static_cast<double>(draws.size());
    }
    return d;
}

InferenceReport infer(const Matrix& g, const FoldPlan& plan, const InferenceOptions& opts) {
    if (!(opts.beta > 0.0 && opts.beta < 1.0)) throw Error("beta must lie in (0, 1)");
    const CrossFitStatistics stats = cross_fit_statistics(g, plan);
    const std::vector<double> draws = bootstrap_draws(g, plan, opts.bootstrap);
    InferenceReport r;
    r.q_v = stats.q_v;
    r.q_u = stats.q_u;
    r.zeta = bootstrap_quantile(draws, opts.alpha);
    r.sigma_sq = sigma_hat_sq(g, plan);
    r.triangle = triangle_ci(r.q_v, r.zeta, plan.n());
    r.delta = delta_ci(r.q_u, r.sigma_sq, plan.n(), opts.alpha);
    r.union_set = union_ci(r.delta, r.triangle);
    r.diagnostic = diagnostic_ratio(r.zeta, r.sigma_sq, plan.n(), opts.beta);
    const TestDecision d = hsic_test(r.q_v, r.zeta, plan.n(), draws);
    r.reject = d.reject;
    r.p_value = d.p_value;
    r.alpha = opts.alpha;
    r.beta = opts.beta;
    r.draws = opts.bootstrap.draws;
    r.n = plan.n();
    r.folds = plan.folds();
    r.seed = opts.bootstrap.seed;
    return r;
}

}  // namespace kresid
