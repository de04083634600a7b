#pragma once

#include "kresid/pipeline.hpp"
#include "kresid/report.hpp"
#include "kresid/synthdata.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace kresid {

enum class GeneratorKind { fourier_anm, covariate_groups, causal_pair };

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::fourier_anm;
    double s_m = 1.0, s_eps = 0.75, sigma0 = 0.35;
    double rho = 0.0;
    GroupArm arm = GroupArm::null;
    bool balanced = false;
    bool reversed = false;  // causal pair: test Y -> X instead
};

Model make_model(const GeneratorSpec& spec, std::uint64_t seed);
Dataset generate(const GeneratorSpec& spec, Index n, std::uint64_t seed);

// Method names: debiased_bootstrap, triangle_ci, debiased_delta, union_ci,
// crossfit_perm, split_perm:<fraction>.
struct ExperimentConfig {
    GeneratorSpec generator;
    std::vector<double> rho_grid{0.0};
    std::vector<GroupArm> arms{GroupArm::null};
    std::vector<Index> n_grid{250};
    int reps = 200;
    std::vector<std::string> methods{"debiased_bootstrap", "triangle_ci", "debiased_delta", "union_ci"};
    PipelineConfig pipeline;
    int permutations = 1000;
    OracleOptions oracle;
    std::uint64_t seed = 0;
    std::string config_hash;
};

// Keys: generator, s_m, s_eps, sigma0, rho (list), arm (list), balanced,
// reversed, n (list), reps, methods (list), alpha, beta, bootstrap, perms,
// folds, seed, x_kernel, q_kernel, l_kernel, centered, oracle_samples,
// oracle_block, allow_few_draws.
ExperimentConfig parse_experiment(const KeyValueConfig& kv);
// Single-dataset settings shared by test, arrow and baseline commands.
PipelineConfig parse_pipeline(const KeyValueConfig& kv);
const std::vector<std::string>& experiment_keys();

struct SweepSetting {
    GeneratorSpec generator;
    Index n = 0;
};

std::vector<SweepSetting> expand_settings(const ExperimentConfig& cfg);
std::uint64_t replication_seed(std::uint64_t master, std::size_t setting, int rep);

struct SweepRow {
    std::size_t setting = 0;
    double rho = 0.0;
    std::string arm;
    Index n = 0;
    std::string method;
    int rep = 0;
    std::uint64_t seed = 0;
    bool reject = false;
    std::optional<double> p_value, statistic;
    std::optional<double> ci_lo, ci_hi;
    std::optional<bool> ci_with_zero, covered;
    std::optional<double> target;
    std::optional<double> q_v, q_u, zeta, sigma_sq, diagnostic;
    std::optional<double> oracle_hsic, oracle_se;
};

std::vector<SweepRow> run_replication(const ExperimentConfig& cfg, const SweepSetting& setting, std::size_t setting_index,
                                      int rep);
// All settings x replications, parallel over replications, rows in order.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

struct AggregateRow {
    std::size_t setting = 0;
    double rho = 0.0;
    std::string arm;
    Index n = 0;
    std::string method;
    int reps = 0;
    double rejection = 0.0, rejection_se = 0.0;
    std::optional<double> coverage, coverage_se, mean_width;
};

std::vector<AggregateRow> aggregate(const std::vector<SweepRow>& rows);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, const std::string& config_hash);
void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows, const std::string& config_hash);
std::vector<SweepRow> read_sweep_csv(std::istream& is);

// "<stem>_aggregate.csv" next to `path`.
std::string aggregate_path(const std::string& path);

}  // namespace kresid
