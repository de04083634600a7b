// One PASS/FAIL line per acceptance criterion. Usage: acceptance [criterion...]

#include "kresid/dataset_io.hpp"
#include "kresid/estimator.hpp"
#include "kresid/inference.hpp"
#include "kresid/pipeline.hpp"
#include "kresid/report.hpp"
#include "kresid/rng.hpp"
#include "kresid/sweep.hpp"
#include "kresid/synthdata.hpp"
#include "reference.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <unistd.h>

using namespace kresid;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
    CounterRng rng(seed);
    std::normal_distribution<double> z;
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index c = 0; c < cols; ++c) m(i, c) = z(rng);
    return m;
}

// |a - b| / max(|b|, max|B|) over all entries.
double matrix_rel(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
    const double scale = b.cwiseAbs().maxCoeff();
    double worst = 0.0;
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / std::max({std::abs(b(i, j)), scale, 1e-300}));
    return worst;
}

double scalar_rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

// ---------------------------------------------------------------- 1

Dataset oracle_instance(int i, Index n, int dy) {
    Dataset d;
    if (i % 2 == 0) {
        d.w = gaussian_matrix(n, 2, 1000 + static_cast<std::uint64_t>(i));
        d.x = d.w.col(0);
        d.projection = {0};
        d.y = 0.5 * gaussian_matrix(n, dy, 2000 + static_cast<std::uint64_t>(i));
        d.y.col(0) += (d.w.col(0).array() * d.w.col(1).array()).sin().matrix();
    } else {
        d = gen_fourier_anm({1.0, 0.75, 0.3, 0.35, n, static_cast<std::uint64_t>(i)});
        if (dy == 2) {
            d.y.conservativeResize(n, 2);
            d.y.col(1) = d.x.col(0).array().cos().matrix() + 0.3 * gaussian_matrix(n, 1, 3000 + static_cast<std::uint64_t>(i));
        }
    }
    return d;
}

Outcome criterion_oracle() {
    double worst = 0.0;
    std::string worst_what;
    auto track = [&](double e, const std::string& what) {
        if (e > worst) {
            worst = e;
            worst_what = what;
        }
    };
    for (int i = 0; i < 20; ++i) {
        const int folds = 2 + i % 2;
        const int dy = 1 + (i / 2) % 2;
        const Index n = folds * (10 + 3 * (i % 4));
        const Dataset d = oracle_instance(i, n, dy);
        const FoldPlan plan = make_folds(n, folds, static_cast<std::uint64_t>(i));
        NuisanceConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(i);
        cfg.lambda_m = i % 3 == 0 ? 0.01 : 0.05;
        cfg.lambda_v = i % 2 == 0 ? 0.02 : 0.1;
        cfg.centered = i % 5 != 4;
        const FoldNuisance nu = fit_fold_nuisances(d, plan, cfg);
        const KernelSpec k = resolve(KernelSpec::gaussian(1), d.x);
        const GramStore store(d, nu, k);

        // Nuisances recomputed independently from the same hyperparameters.
        std::vector<reference::RefFold> folds_ref;
        for (int f = 0; f < folds; ++f) {
            const FoldFit& fit = nu.fold(f);
            const std::vector<double> lv(static_cast<std::size_t>(d.dy()), fit.lambda_v);
            folds_ref.push_back(reference::fit_fold(d, plan, f, fit.q, fit.lambda_m, lv, cfg.centered));
            track(matrix_rel(fit.residuals, folds_ref.back().residuals), "residuals");
            for (int j = 0; j < d.dy(); ++j)
                track(matrix_rel(fit.weights.slice(j), folds_ref.back().weights[static_cast<std::size_t>(j)]), "weights");
        }
        const reference::RefTerms ref = reference::gram_terms(d, plan, folds_ref, k, {nu.l.bandwidth()});
        auto blk = [&](const Matrix& m, int k1, int k2) -> Matrix { return m(plan.members(k1), plan.members(k2)); };
        for (int k1 = 0; k1 < folds; ++k1)
            for (int k2 = 0; k2 < folds; ++k2) {
                track(matrix_rel(store.r_x(k1, k2), blk(ref.rx, k1, k2)), "r_X");
                track(matrix_rel(store.r_xi(k1, k2), blk(ref.rxi, k1, k2)), "r_xi");
                track(matrix_rel(store.r_xi_v(k1, k2, Direction::forward), blk(ref.fwd, k1, k2)), "r_xi_v");
                track(matrix_rel(store.r_xi_v(k1, k2, Direction::swapped), blk(ref.swap, k1, k2)), "r_xi_v swapped");
                track(matrix_rel(store.r_v(k1, k2), blk(ref.rv, k1, k2)), "r_v");
            }
        track(matrix_rel(store.gram(), ref.g), "G");
        const CrossFitStatistics s = cross_fit_statistics(store.gram(), plan);
        for (int k1 = 0; k1 < folds; ++k1)
            for (int k2 = 0; k2 < folds; ++k2)
                track(scalar_rel(s.pair_inner(k1, k2), reference::pair_inner(ref.g, plan, k1, k2)), "pair inner");
        track(scalar_rel(s.q_v, reference::q_v(ref.g, plan)), "Q_V");
        track(scalar_rel(s.q_u, reference::q_u(ref.g)), "Q_U");
        track(scalar_rel(sigma_hat_sq_raw(store.gram(), plan), reference::sigma_sq(ref.g, plan)), "sigma^2");
        const auto mult = bootstrap_multiplicities(plan, static_cast<std::uint64_t>(i), 0);
        track(scalar_rel(bootstrap_statistic(store.gram(), mult), reference::bootstrap_draw(ref.g, plan, mult)),
              "bootstrap draw");
    }
    return {worst <= 1e-10, "20 instances, worst relative error " + fmt(worst) + " (" + worst_what + ")"};
}

// ---------------------------------------------------------------- 2

double kv(const KernelSpec& k, const RowVector& u, const RowVector& v) { return kernel_value(k, u, v); }

Outcome criterion_derivatives() {
    const int d = 2;
    const double h = 1e-5;
    double worst_grad = 0.0, worst_mixed = 0.0;
    const std::vector<KernelSpec> kernels = {KernelSpec::gaussian(d, BandwidthRule::fixed(1.2)),
                                             KernelSpec::matern(d, MaternOrder::five_halves, BandwidthRule::fixed(1.1)),
                                             KernelSpec::matern(d, MaternOrder::seven_halves, BandwidthRule::fixed(0.9))};
    for (std::size_t f = 0; f < kernels.size(); ++f) {
        const KernelSpec& k = kernels[f];
        const Matrix a = gaussian_matrix(100, d, 10 + f), b = gaussian_matrix(100, d, 20 + f);
        const double grad_scale = 1e-3 / k.bandwidth(), mixed_scale = 1.0 / (k.bandwidth() * k.bandwidth());
        for (Index p = 0; p < 100; ++p) {
            const Matrix u = a.row(p), v = b.row(p);
            const Tensor3 g = eval_grad_gram(k, u, v);
            const Tensor4 m = eval_mixed_gram(k, u, v);
            for (int j = 0; j < d; ++j) {
                RowVector up = u.row(0), um = u.row(0);
                up[j] += h;
                um[j] -= h;
                const double fd = (kv(k, up, v.row(0)) - kv(k, um, v.row(0))) / (2 * h);
                worst_grad = std::max(worst_grad, std::abs(g[static_cast<std::size_t>(j)](0, 0) - fd) /
                                                      std::max(std::abs(fd), grad_scale));
                for (int r = 0; r < d; ++r) {
                    auto shifted = [&](double su, double sv) {
                        RowVector x = u.row(0), y = v.row(0);
                        x[j] += su;
                        y[r] += sv;
                        return kv(k, x, y);
                    };
                    const double fd2 = (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4 * h * h);
                    worst_mixed = std::max(worst_mixed, std::abs(m(j, r)(0, 0) - fd2) / std::max(std::abs(fd2), mixed_scale));
                }
            }
        }
    }

    // Gaussian identities at coincident points.
    bool identities = true;
    double worst_fourth = 0.0;
    const double sigma = 0.7;
    const KernelSpec gk = KernelSpec::gaussian(d, BandwidthRule::fixed(sigma));
    const Matrix pts = gaussian_matrix(20, d, 30);
    const Matrix dirs = gaussian_matrix(40, d, 31);
    for (Index p = 0; p < 20; ++p) {
        const Matrix u = pts.row(p);
        const Tensor4 m = eval_mixed_gram(gk, u, u);
        RowVector a = dirs.row(2 * p), b = dirs.row(2 * p + 1);
        a.normalize();
        b.normalize();
        const double second = a * ((Matrix(d, d) << m(0, 0)(0, 0), m(0, 1)(0, 0), m(1, 0)(0, 0), m(1, 1)(0, 0)).finished()) *
                              a.transpose();
        identities = identities && std::abs(second - 1.0 / (sigma * sigma)) < 1e-12 / (sigma * sigma);
        // Fourth derivative d_{1,a} d_{1,b} d_{2,a} d_{2,b} l(u, u) from differences of the analytic second derivative.
        auto directional = [&](const RowVector& x, const RowVector& y) {
            const Tensor4 mm = eval_mixed_gram(gk, x, y);
            double s = 0.0;
            for (int j = 0; j < d; ++j)
                for (int r = 0; r < d; ++r) s += a[j] * a[r] * mm(j, r)(0, 0);
            return s;
        };
        const double hh = 1e-4;
        const RowVector u0 = u.row(0);
        const double fourth = (directional(u0 + hh * b, u0 + hh * b) - directional(u0 + hh * b, u0 - hh * b) -
                               directional(u0 - hh * b, u0 + hh * b) + directional(u0 - hh * b, u0 - hh * b)) /
                              (4 * hh * hh);
        const double ab = a.dot(b);
        const double expect = (1.0 + 2.0 * ab * ab) / std::pow(sigma, 4);
        worst_fourth = std::max(worst_fourth, std::abs(fourth - expect) / expect);
        identities = identities && fourth <= 3.0 / std::pow(sigma, 4) * (1.0 + 1e-5);
    }
    identities = identities && worst_fourth < 1e-5;
    const bool pass = worst_grad <= 1e-6 && worst_mixed <= 1e-5 && identities;
    return {pass, "gradient " + fmt(worst_grad) + " (tol 1e-6), mixed " + fmt(worst_mixed) +
                      " (tol 1e-5), diagonal 1/sigma^2 and fourth-derivative bound " + (identities ? "hold" : "FAIL") +
                      " (fourth-derivative error " + fmt(worst_fourth) + ")"};
}

// ---------------------------------------------------------------- 3

Outcome criterion_identities() {
    double worst_uv = 0.0, min_sigma = INFINITY, worst_colsum = 0.0;
    bool decisions = true;
    int count = 0;
    for (std::uint64_t s = 0; s < 12; ++s) {
        const double rho = 0.1 * static_cast<double>(s % 6);
        const Index n = 60 + 20 * static_cast<Index>(s % 4);
        const int folds = 2 + static_cast<int>(s % 4);
        const Dataset d = gen_fourier_anm({1.0, 0.75, rho, 0.35, n, 100 + s});
        const FoldPlan plan = make_folds(n, folds, s);
        NuisanceConfig cfg;
        cfg.seed = s;
        const FoldNuisance nu = fit_fold_nuisances(d, plan, cfg);
        for (const auto& f : nu.fits)
            for (const auto& slice : f.weights.slices)
                worst_colsum = std::max(worst_colsum, (slice.colwise().sum().array() - 1.0).abs().maxCoeff());
        const GramStore store(d, nu, resolve(KernelSpec::gaussian(1), d.x));
        const Matrix& g = store.gram();
        const CrossFitStatistics st = cross_fit_statistics(g, plan);
        const double nn = static_cast<double>(n);
        const double lhs = nn * nn * st.q_v, rhs = nn * (nn - 1.0) * st.q_u + st.diagonal_sum;
        worst_uv = std::max(worst_uv, std::abs(lhs - rhs) / g.cwiseAbs().sum());
        min_sigma = std::min(min_sigma, sigma_hat_sq_raw(g, plan));
        InferenceOptions io;
        io.bootstrap.seed = s;
        io.bootstrap.draws = 400;
        const InferenceReport r = infer(g, plan, io);
        const bool a = r.reject, b = nn * r.q_v > r.zeta, c = !r.triangle.contains(0.0);
        decisions = decisions && a == b && b == c;
        ++count;
    }
    const bool pass = worst_uv <= 1e-15 * 64 && min_sigma >= -1e-12 && worst_colsum <= 1e-12 && decisions;
    return {pass, std::to_string(count) + " instances: U-V identity residual " + fmt(worst_uv) +
                      " of sum|G|, min raw sigma^2 " + fmt(min_sigma) + ", worst column-sum error " + fmt(worst_colsum) +
                      ", decision equivalence " + (decisions ? "holds" : "FAILS")};
}

// ---------------------------------------------------------------- 4-6

KeyValueConfig config_from(const std::string& text) {
    std::istringstream is(text);
    return KeyValueConfig::parse(is);
}

const AggregateRow* find_row(const std::vector<AggregateRow>& rows, double rho, const std::string& method) {
    for (const auto& r : rows)
        if (r.rho == rho && r.method == method) return &r;
    return nullptr;
}

Outcome criterion_null_calibration() {
    const ExperimentConfig cfg = parse_experiment(
        config_from("generator = fourier_anm\ns_m = 1\ns_eps = 0.75\nrho = 0\nn = 250\nreps = 200\nalpha = 0.05\n"
                    "bootstrap = 1000\nmethods = debiased_bootstrap, triangle_ci\nseed = 20240401\n"));
    const auto agg = aggregate(run_sweep(cfg));
    const AggregateRow* test = find_row(agg, 0.0, "debiased_bootstrap");
    const AggregateRow* tri = find_row(agg, 0.0, "triangle_ci");
    const double rej = test->rejection, cov = *tri->coverage;
    const bool pass = rej >= 0.015 && rej <= 0.10 && cov >= 0.88 && cov <= 0.99;
    return {pass, "rejection " + fmt(rej) + " (+/- " + fmt(test->rejection_se, 2) + ") in [0.015, 0.10], triangle coverage " +
                      fmt(cov) + " in [0.88, 0.99], R = 200"};
}

Outcome criterion_alternative_coverage() {
    const ExperimentConfig cfg = parse_experiment(
        config_from("generator = fourier_anm\ns_m = 1\ns_eps = 0.75\nrho = 0.3\nn = 250\nreps = 200\nalpha = 0.05\n"
                    "bootstrap = 1000\nmethods = debiased_delta, triangle_ci\noracle_samples = 200000\nseed = 20240402\n"));
    const auto agg = aggregate(run_sweep(cfg));
    const double delta = *find_row(agg, 0.3, "debiased_delta")->coverage;
    const double tri = *find_row(agg, 0.3, "triangle_ci")->coverage;
    const bool pass = delta >= 0.85 && delta <= 1.0 && tri >= 0.97;
    return {pass, "delta-method coverage " + fmt(delta) + " in [0.85, 1.00], triangle coverage " + fmt(tri) +
                      " >= 0.97, R = 200"};
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double less = 0.0, equal = 0.0;
            for (double w : v) {
                less += w < v[i];
                equal += w == v[i];
            }
            r[i] = less + (equal + 1.0) / 2.0;
        }
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    const auto n = static_cast<double>(x.size());
    const double mx = (n + 1) / 2;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - mx);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - mx) * (ry[i] - mx);
    }
    return sxx > 0 && syy > 0 ? sxy / std::sqrt(sxx * syy) : 0.0;
}

Outcome criterion_power_ordering() {
    const ExperimentConfig cfg = parse_experiment(
        config_from("generator = fourier_anm\ns_m = 1\ns_eps = 0.75\nrho = 0, 0.25, 0.5\nn = 500\nreps = 100\n"
                    "alpha = 0.05\nbootstrap = 1000\nperms = 1000\nmethods = debiased_bootstrap, crossfit_perm\n"
                    "seed = 20240403\n"));
    const auto agg = aggregate(run_sweep(cfg));
    std::vector<double> rho{0.0, 0.25, 0.5}, rej;
    for (double r : rho) rej.push_back(find_row(agg, r, "debiased_bootstrap")->rejection);
    const double perm = find_row(agg, 0.5, "crossfit_perm")->rejection;
    const double rs = spearman(rho, rej);
    const bool monotone = rej[0] <= rej[1] && rej[1] <= rej[2];
    const bool pass = monotone && rs > 0 && rej[2] - perm >= 0.05;
    return {pass, "debiased rejection " + fmt(rej[0]) + ", " + fmt(rej[1]) + ", " + fmt(rej[2]) + " (Spearman " + fmt(rs) +
                      "), cross-fitted permutation at rho 0.5: " + fmt(perm) + ", gap " + fmt(rej[2] - perm) + " >= 0.05"};
}

// ---------------------------------------------------------------- 7

Outcome criterion_uv_rate() {
    const std::vector<Index> sizes{50, 100, 200, 400};
    std::vector<double> lx, ly;
    std::string gaps, diagonals;
    for (Index n : sizes) {
        double total = 0.0, diag = 0.0;
        for (std::uint64_t s = 0; s < 10; ++s) {
            const std::uint64_t seed = 7000 + 37 * s + static_cast<std::uint64_t>(n);
            const Dataset d = gen_fourier_anm({1.0, 0.75, 0.0, 0.35, n, seed});
            const FoldPlan plan = make_folds(n, 5, seed);
            NuisanceConfig ncfg;
            ncfg.seed = seed;
            const FoldNuisance nu = fit_fold_nuisances(d, plan, ncfg);
            const GramStore store(d, nu, resolve(KernelSpec::gaussian(1), d.x));
            const CrossFitStatistics st = cross_fit_statistics(store.gram(), plan);
            total += std::abs(st.q_u - st.q_v);
            diag += st.diagonal_sum / static_cast<double>(n);
        }
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(total / 10.0));
        gaps += (gaps.empty() ? "" : ", ") + fmt(total / 10.0, 3);
        diagonals += (diagonals.empty() ? "" : ", ") + fmt(diag / 10.0, 3);
    }
    const double mx = (lx[0] + lx[1] + lx[2] + lx[3]) / 4, my = (ly[0] + ly[1] + ly[2] + ly[3]) / 4;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxy / sxx;
    return {std::abs(slope + 1.0) <= 0.2, "mean |Q_U - Q_V| at n = 50..400: " + gaps + "; log-log slope " + fmt(slope) +
                                              " in [-1.2, -0.8] (mean G_ii " + diagonals + ")"};
}

// ---------------------------------------------------------------- 8

Outcome criterion_mmd() {
    const Model model = CovariateGroups({0, GroupArm::alternative, true, 81});
    const Dataset d = sample(model, 50000, 82);
    const Matrix resid = d.y - true_mean(model, d.w);
    const KernelSpec l = resolve(KernelSpec::gaussian(1), resid.topRows(2000));
    const BlockEstimate h = block_hsic(KernelSpec::discrete(1), d.x, l, resid, 256);
    const BlockEstimate m = block_mmd_sq(d.x, l, resid, 256);
    const double se = std::sqrt(h.std_error * h.std_error + m.std_error * m.std_error / 64.0);
    const double gap = std::abs(h.value - m.value / 8.0);
    return {gap <= 3.0 * se, "HSIC " + fmt(h.value, 5) + ", MMD^2/8 " + fmt(m.value / 8.0, 5) + ", |difference| " +
                                 fmt(gap, 3) + " <= 3 x combined SE " + fmt(se, 3)};
}

// ---------------------------------------------------------------- 9

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Outcome criterion_determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("kresid_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    write_dataset_file((dir / "data.csv").string(), gen_fourier_anm({1.0, 0.75, 0.3, 0.35, 150, 91}));
    write_dataset_file((dir / "pair.csv").string(), gen_causal_pair({0.3, 120, 92}).forward);
    {
        std::ofstream cfg(dir / "sweep.cfg");
        cfg << "generator = fourier_anm\nrho = 0, 0.4\nn = 60, 90\nreps = 4\nbootstrap = 200\nperms = 99\nfolds = 3\n"
               "oracle_samples = 20000\nmethods = debiased_bootstrap, triangle_ci, debiased_delta, union_ci, "
               "crossfit_perm, split_perm:0.5\n";
    }
    const std::string cli = KRESID_CLI;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"test", "test --input " + (dir / "data.csv").string() + " --seed 5"},
        {"test_csv", "test --input " + (dir / "data.csv").string() + " --seed 5 --format csv"},
        {"sweep", "sweep --config " + (dir / "sweep.cfg").string() + " --seed 6"},
        {"arrow", "arrow --input " + (dir / "pair.csv").string() + " --seed 7"},
        {"baseline", "baseline --input " + (dir / "data.csv").string() + " --seed 8 --method crossfit_perm"},
        {"split", "baseline --input " + (dir / "data.csv").string() + " --seed 8 --method split_perm:0.4"},
    };
    std::vector<std::string> mismatched;
    for (const auto& [name, args] : commands) {
        std::vector<std::string> outputs;
        for (const char* run : {"1a", "8a", "1b", "8b"}) {
            const std::string threads = run[0] == '1' ? "1" : "8";
            const fs::path out = dir / (name + "_" + run + ".out");
            const std::string command = cli + " " + args + " --threads " + threads + " --out " + out.string();
            if (std::system(command.c_str()) != 0) {
                mismatched.push_back(name + " (exit status)");
                break;
            }
            std::string text = slurp(out);
            if (name == "sweep") text += slurp(aggregate_path(out.string()));
            outputs.push_back(text);
        }
        if (outputs.size() == 4 && outputs[0].empty()) mismatched.push_back(name + " (empty output)");
        else if (outputs.size() == 4 && !(outputs[0] == outputs[1] && outputs[0] == outputs[2] && outputs[0] == outputs[3]))
            mismatched.push_back(name);
    }
    fs::remove_all(dir);
    std::string detail = std::to_string(commands.size()) + " commands x {1, 8} threads x 2 runs";
    if (mismatched.empty()) return {true, detail + ": byte-identical"};
    std::string list;
    for (const auto& m : mismatched) list += " " + m;
    return {false, detail + ": differences in" + list};
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria = {
        {1, {"oracle equivalence", criterion_oracle}},
        {2, {"derivative correctness", criterion_derivatives}},
        {3, {"algebraic identities", criterion_identities}},
        {4, {"null calibration", criterion_null_calibration}},
        {5, {"alternative coverage", criterion_alternative_coverage}},
        {6, {"power ordering", criterion_power_ordering}},
        {7, {"U-V gap rate", criterion_uv_rate}},
        {8, {"MMD relation", criterion_mmd}},
        {9, {"determinism", criterion_determinism}},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    if (selected.empty())
        for (const auto& [id, c] : criteria) selected.push_back(id);

    bool all = true;
    for (int id : selected) {
        const auto it = criteria.find(id);
        if (it == criteria.end()) {
            std::cerr << "unknown criterion " << id << "\n";
            return 2;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = it->second.second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        all = all && o.pass;
        std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << " " << it->second.first << ": "
                  << o.detail << " [" << fmt(secs, 3) << " s]" << std::endl;
    }
    return all ? 0 : 1;
}
