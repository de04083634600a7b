#include "kresid/sweep.hpp"

#include "kresid/baselines.hpp"
#include "kresid/dataset_io.hpp"
#include "kresid/rng.hpp"

#include <exception>
#include <istream>
#include <ostream>
#include <sstream>

namespace kresid {

Model make_model(const GeneratorSpec& spec, std::uint64_t seed) {
    switch (spec.kind) {
        case GeneratorKind::fourier_anm:
            return FourierAnm(FourierAnmConfig{spec.s_m, spec.s_eps, spec.rho, spec.sigma0, 0, seed});
        case GeneratorKind::covariate_groups:
            return CovariateGroups(CovariateGroupConfig{0, spec.arm, spec.balanced, seed});
        case GeneratorKind::causal_pair:
            return CausalPair(CausalPairConfig{spec.rho, 0, seed});
    }
    throw Error("unknown generator");
}

Dataset generate(const GeneratorSpec& spec, Index n, std::uint64_t seed) {
    Dataset d = sample(make_model(spec, seed), n, seed);
    return spec.reversed ? reverse(d) : d;
}

namespace {

const char* arm_name(GroupArm a) { return a == GroupArm::null ? "null" : "alternative"; }

GroupArm parse_arm(const std::string& s) {
    if (s == "null") return GroupArm::null;
    if (s == "alternative") return GroupArm::alternative;
    throw Error("unknown arm '" + s + "'");
}

GeneratorKind parse_generator(const std::string& s) {
    if (s == "fourier_anm") return GeneratorKind::fourier_anm;
    if (s == "covariate_groups") return GeneratorKind::covariate_groups;
    if (s == "causal_pair") return GeneratorKind::causal_pair;
    throw Error("unknown generator '" + s + "'");
}

bool is_debiased(const std::string& m) {
    return m == "debiased_bootstrap" || m == "triangle_ci" || m == "debiased_delta" || m == "union_ci";
}

double split_fraction(const std::string& m) {
    const std::string prefix = "split_perm:";
    if (m.rfind(prefix, 0) != 0) throw Error("unknown method '" + m + "'");
    try {
        return parse_double(m.substr(prefix.size()));
    } catch (const Error&) {
        throw Error("method '" + m + "': bad split fraction");
    }
}

void check_method(const std::string& m) {
    if (is_debiased(m) || m == "crossfit_perm") return;
    const double f = split_fraction(m);
    if (!(f > 0.0 && f < 1.0)) throw Error("method '" + m + "': split fraction must lie in (0, 1)");
}

}  // namespace

const std::vector<std::string>& experiment_keys() {
    static const std::vector<std::string> keys = {
        "generator", "s_m",       "s_eps",    "sigma0",         "rho",          "arm",
        "balanced",  "reversed",  "n",        "reps",           "methods",      "alpha",
        "beta",      "bootstrap", "perms",    "folds",          "seed",         "x_kernel",
        "q_kernel",  "l_kernel",  "centered", "oracle_samples", "oracle_block", "allow_few_draws"};
    return keys;
}

PipelineConfig parse_pipeline(const KeyValueConfig& kv) {
    PipelineConfig p;
    p.folds = static_cast<int>(kv.get_int("folds", 5));
    p.seed = static_cast<std::uint64_t>(kv.get_int("seed", 0));
    p.x_kernel = parse_kernel(kv.get("x_kernel", "gaussian"), 1);
    p.nuisance.q = parse_kernel(kv.get("q_kernel", "matern52"), 1);
    p.nuisance.l = parse_kernel(kv.get("l_kernel", "gaussian"), 1);
    if (!p.nuisance.q.differentiable() || !p.nuisance.l.differentiable())
        throw Error("q_kernel and l_kernel must be gaussian or matern");
    p.nuisance.centered = kv.get_bool("centered", true);
    p.inference.alpha = kv.get_double("alpha", 0.05);
    p.inference.beta = kv.get_double("beta", p.inference.alpha);
    p.inference.bootstrap.draws = static_cast<int>(kv.get_int("bootstrap", 1000));
    p.inference.bootstrap.allow_few_draws = kv.get_bool("allow_few_draws", false);
    if (!(p.inference.alpha > 0.0 && p.inference.alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
    if (!(p.inference.beta > 0.0 && p.inference.beta < 1.0)) throw Error("beta must lie in (0, 1)");
    return p;
}

ExperimentConfig parse_experiment(const KeyValueConfig& kv) {
    kv.check_keys(experiment_keys());
    ExperimentConfig cfg;
    GeneratorSpec& g = cfg.generator;
    g.kind = parse_generator(kv.get("generator", "fourier_anm"));
    g.s_m = kv.get_double("s_m", 1.0);
    g.s_eps = kv.get_double("s_eps", 0.75);
    g.sigma0 = kv.get_double("sigma0", 0.35);
    g.balanced = kv.get_bool("balanced", false);
    g.reversed = kv.get_bool("reversed", false);
    if (g.reversed && g.kind != GeneratorKind::causal_pair) throw Error("reversed applies to the causal_pair generator only");
    const bool groups = g.kind == GeneratorKind::covariate_groups;

    KeyValueConfig effective = kv;
    if (groups) {
        if (!kv.has("x_kernel")) effective.set("x_kernel", "discrete");
        if (!kv.has("folds")) effective.set("folds", "4");
    }
    cfg.pipeline = parse_pipeline(effective);
    cfg.seed = cfg.pipeline.seed;

    cfg.rho_grid = kv.get_double_list("rho", {0.0});
    for (double r : cfg.rho_grid)
        if (r < 0.0) throw Error("rho must be non-negative");
    cfg.arms.clear();
    for (const auto& a : kv.get_list("arm", {"null"})) cfg.arms.push_back(parse_arm(a));
    cfg.n_grid.clear();
    for (double v : kv.get_double_list("n", {groups ? 120.0 : 250.0})) {
        if (v != std::floor(v) || v < 2.0) throw Error("n must be an integer >= 2");
        cfg.n_grid.push_back(static_cast<Index>(v));
    }
    cfg.reps = static_cast<int>(kv.get_int("reps", 200));
    if (cfg.reps < 1) throw Error("reps must be at least 1");
    cfg.methods = kv.get_list("methods", cfg.methods);
    for (const auto& m : cfg.methods) check_method(m);
    cfg.permutations = static_cast<int>(kv.get_int("perms", 1000));
    if (cfg.permutations < 1) throw Error("perms must be at least 1");
    cfg.oracle.samples = static_cast<Index>(kv.get_int("oracle_samples", 200000));
    cfg.oracle.block = static_cast<Index>(kv.get_int("oracle_block", 256));
    cfg.config_hash = kv.hash();
    return cfg;
}

std::vector<SweepSetting> expand_settings(const ExperimentConfig& cfg) {
    std::vector<SweepSetting> out;
    const bool groups = cfg.generator.kind == GeneratorKind::covariate_groups;
    const std::size_t outer = groups ? cfg.arms.size() : cfg.rho_grid.size();
    for (std::size_t i = 0; i < outer; ++i)
        for (Index n : cfg.n_grid) {
            SweepSetting s{cfg.generator, n};
            if (groups)
                s.generator.arm = cfg.arms[i];
            else
                s.generator.rho = cfg.rho_grid[i];
            out.push_back(s);
        }
    return out;
}

std::uint64_t replication_seed(std::uint64_t master, std::size_t setting, int rep) {
    return derive_seed(derive_seed(master, StreamTag::setting, setting), StreamTag::replication,
                       static_cast<std::uint64_t>(rep));
}

std::vector<SweepRow> run_replication(const ExperimentConfig& cfg, const SweepSetting& setting, std::size_t setting_index,
                                      int rep) {
    const std::uint64_t seed = replication_seed(cfg.seed, setting_index, rep);
    const Model model = make_model(setting.generator, seed);
    Dataset data = sample(model, setting.n, seed);
    if (setting.generator.reversed) data = reverse(data);

    SweepRow base;
    base.setting = setting_index;
    base.rho = setting.generator.rho;
    base.arm = setting.generator.kind == GeneratorKind::covariate_groups ? arm_name(setting.generator.arm) : "";
    base.n = setting.n;
    base.rep = rep;
    base.seed = seed;

    bool need_debiased = false, need_oracle = false;
    for (const auto& m : cfg.methods)
        if (is_debiased(m)) {
            need_debiased = true;
            need_oracle = need_oracle || !setting.generator.reversed;
        }

    std::optional<PipelineResult> res;
    if (need_debiased) {
        PipelineConfig p = cfg.pipeline;
        p.seed = seed;
        res = run_debiased_test(data, p);
    }
    std::optional<OracleSignal> oracle;
    if (need_oracle) {
        OracleOptions o = cfg.oracle;
        o.seed = seed;
        oracle = oracle_signal(model, o);
    }

    BaselineConfig bcfg;
    bcfg.x_kernel = cfg.pipeline.x_kernel;
    bcfg.nuisance = cfg.pipeline.nuisance;
    bcfg.nuisance.seed = seed;
    bcfg.permutations = cfg.permutations;
    bcfg.alpha = cfg.pipeline.inference.alpha;
    bcfg.seed = seed;

    std::vector<SweepRow> rows;
    for (const auto& m : cfg.methods) {
        SweepRow row = base;
        row.method = m;
        if (is_debiased(m)) {
            const InferenceReport& r = res->report;
            row.q_v = r.q_v;
            row.q_u = r.q_u;
            row.zeta = r.zeta;
            row.sigma_sq = r.sigma_sq;
            row.diagnostic = r.diagnostic;
            if (oracle) {
                row.oracle_hsic = oracle->hsic;
                row.oracle_se = oracle->std_error;
            }
            if (m == "debiased_bootstrap" || m == "triangle_ci") {
                row.reject = r.reject;
                if (m == "debiased_bootstrap") row.p_value = r.p_value;
                row.statistic = static_cast<double>(r.n) * r.q_v;
                row.ci_lo = r.triangle.lo;
                row.ci_hi = r.triangle.hi;
                if (oracle) {
                    row.target = oracle->norm;
                    row.covered = r.triangle.contains(oracle->norm);
                }
            } else if (m == "debiased_delta") {
                row.reject = !r.delta.contains(0.0);
                row.ci_lo = r.delta.lo;
                row.ci_hi = r.delta.hi;
                if (oracle) {
                    row.target = oracle->hsic;
                    row.covered = r.delta.contains(oracle->hsic);
                }
            } else {
                row.reject = !r.union_set.contains(0.0);
                row.ci_lo = r.union_set.interval.lo;
                row.ci_hi = r.union_set.interval.hi;
                row.ci_with_zero = r.union_set.with_zero;
                if (oracle) {
                    row.target = oracle->hsic;
                    row.covered = r.union_set.contains(oracle->hsic);
                }
            }
        } else {
            PermutationResult pr;
            if (m == "crossfit_perm")
                pr = crossfit_permutation_test(data, make_folds(data.n(), cfg.pipeline.folds, seed), bcfg);
            else
                pr = split_fit_test(data, split_fraction(m), bcfg);
            row.reject = pr.reject;
            row.p_value = pr.p_value;
            row.statistic = pr.observed;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
    const auto settings = expand_settings(cfg);
    const std::size_t jobs = settings.size() * static_cast<std::size_t>(cfg.reps);
    std::vector<std::vector<SweepRow>> results(jobs);
    std::vector<std::exception_ptr> errors(jobs);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(jobs); ++j) {
        const auto s = static_cast<std::size_t>(j) / static_cast<std::size_t>(cfg.reps);
        const auto rep = static_cast<int>(static_cast<std::size_t>(j) % static_cast<std::size_t>(cfg.reps));
        try {
            results[static_cast<std::size_t>(j)] = run_replication(cfg, settings[s], s, rep);
        } catch (...) {
            errors[static_cast<std::size_t>(j)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<SweepRow> rows;
    for (auto& r : results)
        for (auto& row : r) rows.push_back(std::move(row));
    return rows;
}

std::vector<AggregateRow> aggregate(const std::vector<SweepRow>& rows) {
    std::vector<AggregateRow> out;
    struct Acc {
        int reps = 0, rejects = 0, covered = 0, with_target = 0, with_ci = 0;
        double width = 0.0;
    };
    std::vector<Acc> acc;
    for (const auto& r : rows) {
        std::size_t g = 0;
        while (g < out.size() && !(out[g].setting == r.setting && out[g].method == r.method)) ++g;
        if (g == out.size()) {
            out.push_back({r.setting, r.rho, r.arm, r.n, r.method, 0, 0.0, 0.0, {}, {}, {}});
            acc.emplace_back();
        }
        Acc& a = acc[g];
        ++a.reps;
        a.rejects += r.reject;
        if (r.covered) {
            ++a.with_target;
            a.covered += *r.covered;
        }
        if (r.ci_lo && r.ci_hi) {
            ++a.with_ci;
            a.width += *r.ci_hi - *r.ci_lo;
        }
    }
    for (std::size_t g = 0; g < out.size(); ++g) {
        const Acc& a = acc[g];
        AggregateRow& o = out[g];
        o.reps = a.reps;
        o.rejection = static_cast<double>(a.rejects) / a.reps;
        o.rejection_se = std::sqrt(o.rejection * (1.0 - o.rejection) / a.reps);
        if (a.with_target == a.reps) {
            const double c = static_cast<double>(a.covered) / a.reps;
            o.coverage = c;
            o.coverage_se = std::sqrt(c * (1.0 - c) / a.reps);
        }
        if (a.with_ci == a.reps) o.mean_width = a.width / a.reps;
    }
    return out;
}

namespace {

const char* const sweep_columns[] = {"config_hash", "setting",   "rho",         "arm",     "n",        "method",
                                     "rep",         "seed",      "reject",      "p_value", "statistic", "ci_lo",
                                     "ci_hi",       "ci_with_zero", "covered",  "target",  "q_v",      "q_u",
                                     "zeta",        "sigma_sq",  "diagnostic",  "oracle_hsic", "oracle_se"};

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : ""; }
std::string opt(const std::optional<bool>& v) { return v ? (*v ? "1" : "0") : ""; }

std::string join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    return out;
}

}  // namespace

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, const std::string& config_hash) {
    os << join({std::begin(sweep_columns), std::end(sweep_columns)}) << '\n';
    for (const auto& r : rows)
        os << join({config_hash, std::to_string(r.setting), format_double(r.rho), r.arm, std::to_string(r.n), r.method,
                    std::to_string(r.rep), std::to_string(r.seed), r.reject ? "1" : "0", opt(r.p_value),
                    opt(r.statistic), opt(r.ci_lo), opt(r.ci_hi), opt(r.ci_with_zero), opt(r.covered), opt(r.target),
                    opt(r.q_v), opt(r.q_u), opt(r.zeta), opt(r.sigma_sq), opt(r.diagnostic), opt(r.oracle_hsic),
                    opt(r.oracle_se)})
           << '\n';
}

void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows, const std::string& config_hash) {
    os << "config_hash,setting,rho,arm,n,method,reps,rejection,rejection_se,coverage,coverage_se,mean_width\n";
    for (const auto& r : rows)
        os << join({config_hash, std::to_string(r.setting), format_double(r.rho), r.arm, std::to_string(r.n), r.method,
                    std::to_string(r.reps), format_double(r.rejection), format_double(r.rejection_se), opt(r.coverage),
                    opt(r.coverage_se), opt(r.mean_width)})
           << '\n';
}

std::vector<SweepRow> read_sweep_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error("empty sweep file");
    std::vector<SweepRow> rows;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> c;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) c.push_back(cell);
        if (line.back() == ',') c.emplace_back();
        if (c.size() != std::size(sweep_columns))
            throw Error("sweep row " + std::to_string(line_no) + ": expected " + std::to_string(std::size(sweep_columns)) +
                        " fields");
        auto d = [&](std::size_t i) -> std::optional<double> {
            if (c[i].empty()) return std::nullopt;
            return parse_double(c[i]);
        };
        auto b = [&](std::size_t i) -> std::optional<bool> {
            if (c[i].empty()) return std::nullopt;
            return c[i] == "1";
        };
        SweepRow r;
        r.setting = std::stoul(c[1]);
        r.rho = parse_double(c[2]);
        r.arm = c[3];
        r.n = std::stol(c[4]);
        r.method = c[5];
        r.rep = std::stoi(c[6]);
        r.seed = std::stoull(c[7]);
        r.reject = c[8] == "1";
        r.p_value = d(9);
        r.statistic = d(10);
        r.ci_lo = d(11);
        r.ci_hi = d(12);
        r.ci_with_zero = b(13);
        r.covered = b(14);
        r.target = d(15);
        r.q_v = d(16);
        r.q_u = d(17);
        r.zeta = d(18);
        r.sigma_sq = d(19);
        r.diagnostic = d(20);
        r.oracle_hsic = d(21);
        r.oracle_se = d(22);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string aggregate_path(const std::string& path) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        return path.substr(0, dot) + "_aggregate" + path.substr(dot);
    return path + "_aggregate.csv";
}

}  // namespace kresid
