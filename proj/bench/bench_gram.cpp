#include "kresid/estimator.hpp"
#include "kresid/rng.hpp"
#include "kresid/synthdata.hpp"
#include "reference.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

using namespace kresid;

namespace {

Matrix points(Index n, int d, std::uint64_t seed) {
    CounterRng rng(seed);
    std::normal_distribution<double> z;
    Matrix m(n, d);
    for (Index i = 0; i < n; ++i)
        for (int c = 0; c < d; ++c) m(i, c) = z(rng);
    return m;
}

// Arg 0: rows, arg 1: threads.
void BM_MixedGram(benchmark::State& state) {
    const Matrix a = points(state.range(0), 2, 1), b = points(state.range(0), 2, 2);
    const KernelSpec l = KernelSpec::gaussian(2, BandwidthRule::fixed(1.0));
    omp_set_num_threads(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(eval_mixed_gram(l, a, b));
}
BENCHMARK(BM_MixedGram)->ArgsProduct({{256, 1024}, {1, 8}})->Unit(benchmark::kMillisecond);

void BM_Gram(benchmark::State& state) {
    const Matrix a = points(state.range(0), 1, 3);
    const KernelSpec k = KernelSpec::matern(1, MaternOrder::five_halves, BandwidthRule::fixed(1.0));
    omp_set_num_threads(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(eval_gram(k, a, a));
}
BENCHMARK(BM_Gram)->ArgsProduct({{1024, 4096}, {1, 8}})->Unit(benchmark::kMillisecond);

struct Instance {
    Dataset data;
    FoldPlan plan;
    FoldNuisance nuisance;
    KernelSpec k;
};

Instance make_instance(Index n) {
    Dataset data = gen_fourier_anm({1.0, 0.75, 0.3, 0.35, n, 11});
    FoldPlan plan = make_folds(n, 2, 11);
    NuisanceConfig cfg;
    cfg.lambda_m = 1e-2;
    cfg.lambda_v = 1e-2;
    FoldNuisance nuisance = fit_fold_nuisances(data, plan, cfg);
    const KernelSpec k = resolve(KernelSpec::gaussian(1), data.x);
    return {std::move(data), std::move(plan), std::move(nuisance), k};
}

void BM_GramStore(benchmark::State& state) {
    const Instance inst = make_instance(state.range(0));
    omp_set_num_threads(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(GramStore(inst.data, inst.nuisance, inst.k).gram());
}
BENCHMARK(BM_GramStore)->ArgsProduct({{40, 250}, {1, 8}})->Unit(benchmark::kMillisecond);

void BM_ReferenceGram(benchmark::State& state) {
    const Instance inst = make_instance(state.range(0));
    std::vector<reference::RefFold> folds;
    for (const auto& f : inst.nuisance.fits) folds.push_back({f.residuals, f.weights.slices});
    const reference::GaussianL l{inst.nuisance.l.bandwidth()};
    for (auto _ : state) benchmark::DoNotOptimize(reference::gram_terms(inst.data, inst.plan, folds, inst.k, l).g);
}
BENCHMARK(BM_ReferenceGram)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
