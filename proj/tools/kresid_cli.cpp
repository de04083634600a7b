#include "kresid/baselines.hpp"
#include "kresid/dataset_io.hpp"
#include "kresid/pipeline.hpp"
#include "kresid/report.hpp"
#include "kresid/sweep.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace kresid;

namespace {

struct CommonFlags {
    std::string config, input, out, format = "json";
    std::optional<std::uint64_t> seed;
    std::optional<int> folds, bootstrap, perms, threads;
    std::optional<double> alpha, beta;
    std::optional<long long> n;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_input) {
    cmd->add_option("--config", f.config, "key = value configuration file");
    if (with_input) cmd->add_option("--input", f.input, "dataset file with x_*, w_*, y_* columns");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--folds", f.folds, "number of cross-fitting folds");
    cmd->add_option("--alpha", f.alpha, "test level");
    cmd->add_option("--beta", f.beta, "diagnostic level");
    cmd->add_option("--bootstrap", f.bootstrap, "bootstrap draws");
    cmd->add_option("--perms", f.perms, "permutations for baselines");
    cmd->add_option("--out", f.out, "output path (default stdout)");
    cmd->add_option("--threads", f.threads, "worker threads (default $KRESID_THREADS)");
}

KeyValueConfig load_config(const CommonFlags& f) {
    KeyValueConfig kv = f.config.empty() ? KeyValueConfig{} : KeyValueConfig::parse_file(f.config);
    if (f.seed) kv.set("seed", std::to_string(*f.seed));
    if (f.folds) kv.set("folds", std::to_string(*f.folds));
    if (f.alpha) kv.set("alpha", format_double(*f.alpha));
    if (f.beta) kv.set("beta", format_double(*f.beta));
    if (f.bootstrap) kv.set("bootstrap", std::to_string(*f.bootstrap));
    if (f.perms) kv.set("perms", std::to_string(*f.perms));
    if (f.n) kv.set("n", std::to_string(*f.n));
    kv.check_keys(experiment_keys());
    return kv;
}

void set_threads(const CommonFlags& f) {
    int threads = 0;
    if (f.threads) {
        threads = *f.threads;
    } else if (const char* env = std::getenv("KRESID_THREADS")) {
        threads = std::atoi(env);
    }
    if (threads > 0) omp_set_num_threads(threads);
    omp_set_max_active_levels(1);
}

// Dataset from --input, otherwise from the configured generator.
Dataset load_data(const CommonFlags& f, const KeyValueConfig& kv, std::optional<GeneratorKind> force = {}) {
    if (!f.input.empty()) return read_dataset_file(f.input);
    const ExperimentConfig exp = parse_experiment(kv);
    GeneratorSpec spec = exp.generator;
    if (force && !kv.has("generator")) spec = GeneratorSpec{*force};
    if (exp.generator.kind == GeneratorKind::covariate_groups) spec.arm = exp.arms.front();
    else spec.rho = exp.rho_grid.front();
    return generate(spec, exp.n_grid.front(), exp.seed);
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write '" + path + "'");
    os << text;
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

int cmd_test(const CommonFlags& f) {
    const KeyValueConfig kv = load_config(f);
    const Dataset data = load_data(f, kv);
    PipelineConfig cfg = parse_pipeline(kv);
    const PipelineResult r = run_debiased_test(data, cfg);
    if (f.format == "csv") {
        emit(f.out, "config_hash," + report_csv_header() + "\n" + kv.hash() + "," + report_csv_row(r.report) + "\n");
    } else {
        emit(f.out, dump(pipeline_json(r, kv.hash())));
    }
    return 0;
}

int cmd_arrow(const CommonFlags& f) {
    const KeyValueConfig kv = load_config(f);
    const Dataset data = load_data(f, kv, GeneratorKind::causal_pair);
    const ArrowResult r = run_arrow(data, parse_pipeline(kv));
    nlohmann::ordered_json j;
    j["config_hash"] = kv.hash();
    j["forward"] = report_json(r.forward.report);
    j["reverse"] = report_json(r.reverse.report);
    j["verdict"] = verdict_name(r.verdict);
    emit(f.out, dump(j));
    return 0;
}

int cmd_baseline(const CommonFlags& f, const std::string& method) {
    const KeyValueConfig kv = load_config(f);
    const Dataset data = load_data(f, kv);
    const PipelineConfig p = parse_pipeline(kv);
    BaselineConfig b;
    b.x_kernel = p.x_kernel;
    b.nuisance = p.nuisance;
    b.nuisance.seed = p.seed;
    b.permutations = static_cast<int>(kv.get_int("perms", 1000));
    b.alpha = p.inference.alpha;
    b.seed = p.seed;
    PermutationResult r;
    if (method == "crossfit_perm") {
        r = crossfit_permutation_test(data, make_folds(data.n(), p.folds, p.seed), b);
    } else if (method.rfind("split_perm:", 0) == 0) {
        r = split_fit_test(data, parse_double(method.substr(11)), b);
    } else {
        throw Error("unknown baseline '" + method + "'");
    }
    nlohmann::ordered_json j;
    j["config_hash"] = kv.hash();
    j["method"] = method;
    j["statistic"] = r.observed;
    j["p_value"] = r.p_value;
    j["reject"] = r.reject;
    j["permutations"] = b.permutations;
    emit(f.out, dump(j));
    return 0;
}

int cmd_sweep(const CommonFlags& f) {
    const KeyValueConfig kv = load_config(f);
    const ExperimentConfig cfg = parse_experiment(kv);
    const auto rows = run_sweep(cfg);
    std::ostringstream per_rep, agg;
    write_sweep_csv(per_rep, rows, cfg.config_hash);
    write_aggregate_csv(agg, aggregate(rows), cfg.config_hash);
    if (f.out.empty()) {
        std::cout << per_rep.str() << "\n" << agg.str();
    } else {
        emit(f.out, per_rep.str());
        emit(aggregate_path(f.out), agg.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Debiased kernel residual independence testing"};
    app.require_subcommand(1);

    CommonFlags test_f, sweep_f, arrow_f, base_f;
    std::string method = "crossfit_perm";

    auto* test = app.add_subcommand("test", "run the debiased test on one dataset");
    add_common(test, test_f, true);
    test->add_option("--n", test_f.n, "sample size when generating");
    test->add_option("--format", test_f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over a configured grid");
    add_common(sweep, sweep_f, false);

    auto* arrow = app.add_subcommand("arrow", "compare both regression directions");
    add_common(arrow, arrow_f, true);
    arrow->add_option("--n", arrow_f.n, "sample size when generating");

    auto* base = app.add_subcommand("baseline", "plug-in permutation baselines");
    add_common(base, base_f, true);
    base->add_option("--n", base_f.n, "sample size when generating");
    base->add_option("--method", method, "crossfit_perm or split_perm:<fraction>");

    CLI11_PARSE(app, argc, argv);
    try {
        if (test->parsed()) {
            set_threads(test_f);
            return cmd_test(test_f);
        }
        if (sweep->parsed()) {
            set_threads(sweep_f);
            return cmd_sweep(sweep_f);
        }
        if (arrow->parsed()) {
            set_threads(arrow_f);
            return cmd_arrow(arrow_f);
        }
        set_threads(base_f);
        return cmd_baseline(base_f, method);
    } catch (const std::exception& e) {
        std::cerr << "kresid: " << e.what() << "\n";
        return 2;
    }
}
