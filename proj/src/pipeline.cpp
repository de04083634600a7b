#include "kresid/pipeline.hpp"

#include "kresid/synthdata.hpp"

namespace kresid {

PipelineResult run_debiased_test(const Dataset& data, const PipelineConfig& cfg) {
    data.validate();
    const FoldPlan plan = make_folds(data.n(), cfg.folds, cfg.seed);
    NuisanceConfig ncfg = cfg.nuisance;
    ncfg.seed = cfg.seed;
    const FoldNuisance nuisance = fit_fold_nuisances(data, plan, ncfg);
    const KernelSpec k = resolve(cfg.x_kernel.with_dimension(data.dx()), data.x);
    const GramStore store(data, nuisance, k);

    InferenceOptions iopts = cfg.inference;
    iopts.bootstrap.seed = cfg.seed;
    PipelineResult out;
    out.report = infer(store.gram(), plan, iopts);
    out.statistics = cross_fit_statistics(store.gram(), plan);
    out.fold_assignment = plan.assignment();
    out.x_bandwidth = k.differentiable() ? k.bandwidth() : 0.0;
    out.residual_bandwidth = nuisance.l.bandwidth();
    for (const auto& f : nuisance.fits) {
        out.lambda_m.push_back(f.lambda_m);
        out.lambda_v.push_back(f.lambda_v);
    }
    return out;
}

const char* verdict_name(ArrowVerdict v) {
    switch (v) {
        case ArrowVerdict::forward: return "forward";
        case ArrowVerdict::reverse: return "reverse";
        case ArrowVerdict::both_rejected: return "both_rejected";
        case ArrowVerdict::undecided: return "undecided";
    }
    return "undecided";
}

ArrowVerdict arrow_verdict(bool forward_rejected, bool reverse_rejected) {
    if (!forward_rejected && reverse_rejected) return ArrowVerdict::forward;
    if (forward_rejected && !reverse_rejected) return ArrowVerdict::reverse;
    if (forward_rejected && reverse_rejected) return ArrowVerdict::both_rejected;
    return ArrowVerdict::undecided;
}

ArrowResult run_arrow(const Dataset& forward, const PipelineConfig& cfg) {
    if (forward.dx() != 1 || forward.dy() != 1) throw Error("arrow needs exactly one x column and one y column");
    ArrowResult r;
    r.forward = run_debiased_test(forward, cfg);
    r.reverse = run_debiased_test(reverse(forward), cfg);
    r.verdict = arrow_verdict(r.forward.report.reject, r.reverse.report.reject);
    return r;
}

}  // namespace kresid
