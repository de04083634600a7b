#include "kresid/synthdata.hpp"

#include "kresid/rng.hpp"

#include <algorithm>
#include <complex>
#include <numbers>
#include <numeric>
#include <random>

namespace kresid {

namespace {

constexpr Index grid_points = 1000000;
constexpr double x_lo = -3.0, x_hi = 3.0;

// sum_k c_k sin(k x + phi_k) = Im sum_k c_k e^{i phi_k} e^{i k x}
double sine_series(const std::array<std::complex<double>, fourier_terms>& coef, double x) {
    const std::complex<double> z(std::cos(x), std::sin(x));
    std::complex<double> p = z, acc = 0.0;
    for (const auto& c : coef) {
        acc += c * p;
        p *= z;
    }
    return acc.imag();
}

std::array<std::complex<double>, fourier_terms> series_coefficients(const std::array<double, fourier_terms>& amp,
                                                                    const std::array<double, fourier_terms>& phase,
                                                                    double decay) {
    std::array<std::complex<double>, fourier_terms> c{};
    for (int k = 0; k < fourier_terms; ++k)
        c[static_cast<std::size_t>(k)] = std::polar(1.0, phase[static_cast<std::size_t>(k)]) *
                                         (amp[static_cast<std::size_t>(k)] * std::pow(k + 1.0, -decay));
    return c;
}

}  // namespace

FourierAnm::FourierAnm(const FourierAnmConfig& cfg) : cfg_(cfg) {
    if (!(cfg.sigma0 > 0.0) || cfg.rho < 0.0) throw Error("fourier model needs sigma0 > 0 and rho >= 0");
    CounterRng rng(cfg.seed, StreamTag::model_coefficients);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
    std::array<double, fourier_terms> a{}, phi_m{}, b{}, phi_s{};
    for (auto& v : a) v = normal(rng);
    for (auto& v : phi_m) v = phase(rng);
    for (auto& v : b) v = normal(rng);
    for (auto& v : phi_s) v = phase(rng);
    mean_coef_ = series_coefficients(a, phi_m, cfg.s_m);
    scale_coef_ = series_coefficients(b, phi_s, cfg.s_eps);
    c_m_ = 1.0 / std::sqrt(grid_moments(x_lo, x_hi, grid_points, [&](double x) { return sine_series(mean_coef_, x); }).second);
    c_eps_ = 1.0 / std::sqrt(grid_moments(x_lo, x_hi, grid_points, [&](double x) { return sine_series(scale_coef_, x); }).second);
    for (auto& c : mean_coef_) c *= c_m_;
    for (auto& c : scale_coef_) c *= c_eps_;
}

double FourierAnm::mean(double x) const { return sine_series(mean_coef_, x); }

double FourierAnm::noise_scale(double x) const {
    if (cfg_.rho == 0.0) return cfg_.sigma0;
    return cfg_.sigma0 * std::exp(cfg_.rho * sine_series(scale_coef_, x));
}

double CovariateGroups::mean(double x, double t) {
    double s = 0.2 * x;
    for (int k = 1; k <= 5; ++k) {
        const double sk = std::sin(k * t), ck = std::cos(k * t);
        s += (0.30 * sk + 0.25 * ck + 0.22 * x * sk + 0.18 * x * ck) / k;
    }
    return 1.5 * s;
}

double CovariateGroups::noise_scale(double x) const {
    if (cfg_.arm == GroupArm::null) return 0.45;
    return x == 0.0 ? 0.35 : 0.55;
}

CausalPair::CausalPair(const CausalPairConfig& cfg) : cfg_(cfg) {
    if (cfg.rho < 0.0) throw Error("causal pair needs rho >= 0");
    const auto [mean, var] = grid_moments(x_lo, x_hi, grid_points, [](double x) { return h(x); });
    h_mean_ = mean;
    c_ = std::sqrt(1.0 / var);
}

double CausalPair::mean(double x) {
    return 0.55 * x + 0.95 * std::sin(1.65 * x) + 0.38 * std::sin(3.6 * x) + 0.1 * x * x * x;
}

double CausalPair::h(double x) { return std::sin(1.6 * x) + 0.35 * std::cos(2.4 * x); }

double CausalPair::noise_scale(double x) const {
    if (cfg_.rho == 0.0) return 0.45;
    return 0.45 * std::exp(c_ * cfg_.rho * (h(x) - h_mean_));
}

Dataset sample(const Model& model, Index n, std::uint64_t seed) {
    if (n < 1) throw Error("sample size must be positive");
    CounterRng rng(seed, StreamTag::sample);
    std::normal_distribution<double> normal;
    Dataset d;
    if (const auto* g = std::get_if<CovariateGroups>(&model)) {
        std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
        std::vector<double> groups(static_cast<std::size_t>(n));
        if (g->config().balanced) {
            for (Index i = 0; i < n; ++i) groups[static_cast<std::size_t>(i)] = static_cast<double>(2 * i >= n);
            std::shuffle(groups.begin(), groups.end(), rng);
        } else {
            std::bernoulli_distribution coin(0.5);
            for (auto& v : groups) v = coin(rng) ? 1.0 : 0.0;
        }
        d.w.resize(n, 2);
        d.y.resize(n, 1);
        for (Index i = 0; i < n; ++i) {
            const double x = groups[static_cast<std::size_t>(i)];
            const double t = angle(rng);
            d.w(i, 0) = x;
            d.w(i, 1) = t;
            d.y(i, 0) = CovariateGroups::mean(x, t) + g->noise_scale(x) * normal(rng);
        }
        d.x = d.w.col(0);
        d.projection = {0};
        return d;
    }
    std::uniform_real_distribution<double> unif(x_lo, x_hi);
    d.w.resize(n, 1);
    d.y.resize(n, 1);
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (!std::is_same_v<M, CovariateGroups>) {
                for (Index i = 0; i < n; ++i) {
                    const double x = unif(rng);
                    d.w(i, 0) = x;
                    d.y(i, 0) = m.mean(x) + m.noise_scale(x) * normal(rng);
                }
            }
        },
        model);
    d.x = d.w;
    d.projection = {0};
    return d;
}

Matrix true_mean(const Model& model, const Matrix& w) {
    Matrix out(w.rows(), 1);
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            for (Index i = 0; i < w.rows(); ++i) {
                if constexpr (std::is_same_v<M, CovariateGroups>)
                    out(i, 0) = CovariateGroups::mean(w(i, 0), w(i, 1));
                else
                    out(i, 0) = m.mean(w(i, 0));
            }
        },
        model);
    return out;
}

bool known_null(const Model& model) {
    if (const auto* f = std::get_if<FourierAnm>(&model)) return f->config().rho == 0.0;
    if (const auto* g = std::get_if<CovariateGroups>(&model)) return g->config().arm == GroupArm::null;
    return std::get<CausalPair>(model).config().rho == 0.0;
}

KernelSpec default_x_kernel(const Model& model) {
    if (std::holds_alternative<CovariateGroups>(model)) return KernelSpec::discrete(1);
    return KernelSpec::gaussian(1);
}

Dataset gen_fourier_anm(const FourierAnmConfig& cfg) { return sample(FourierAnm(cfg), cfg.n, cfg.seed); }

Dataset gen_covariate_groups(const CovariateGroupConfig& cfg) { return sample(CovariateGroups(cfg), cfg.n, cfg.seed); }

Dataset reverse(const Dataset& data) {
    if (data.dx() != 1 || data.dy() != 1) throw Error("reversal needs one x and one y column");
    Dataset r;
    r.x = data.y;
    r.w = data.y;
    r.y = data.x;
    r.projection = {0};
    return r;
}

CausalPairData gen_causal_pair(const CausalPairConfig& cfg) {
    Dataset forward = sample(CausalPair(cfg), cfg.n, cfg.seed);
    Dataset reversed = reverse(forward);
    return {std::move(forward), std::move(reversed)};
}

double hsic_unbiased(const Matrix& k_gram, const Matrix& l_gram) {
    const Index n = k_gram.rows();
    if (n < 4) throw Error("unbiased HSIC needs at least four rows");
    Matrix k = k_gram, l = l_gram;
    k.diagonal().setZero();
    l.diagonal().setZero();
    const auto m = static_cast<double>(n);
    const Vector k1 = k.rowwise().sum(), l1 = l.rowwise().sum();
    const double trace = k.cwiseProduct(l.transpose()).sum();
    const double cross = k1.dot(l1);
    return (trace + k1.sum() * l1.sum() / ((m - 1.0) * (m - 2.0)) - 2.0 * cross / (m - 2.0)) / (m * (m - 3.0));
}

namespace {

BlockEstimate summarize(const std::vector<double>& values) {
    if (values.size() < 2) throw Error("block estimate needs at least two blocks");
    CompensatedSum s;
    for (double v : values) s.add(v);
    const double mean = s.value() / static_cast<double>(values.size());
    CompensatedSum ss;
    for (double v : values) ss.add((v - mean) * (v - mean));
    const double var = ss.value() / static_cast<double>(values.size() - 1);
    return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

double mean_off_diagonal(const Matrix& g) {
    const auto n = static_cast<double>(g.rows());
    return (g.sum() - g.trace()) / (n * (n - 1.0));
}

}  // namespace

BlockEstimate block_hsic(const KernelSpec& k, const Matrix& x, const KernelSpec& l, const Matrix& residuals,
                         Index block) {
    const Index blocks = x.rows() / block;
    std::vector<double> values(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static)
    for (Index b = 0; b < blocks; ++b) {
        const Matrix xb = x.middleRows(b * block, block), rb = residuals.middleRows(b * block, block);
        values[static_cast<std::size_t>(b)] = hsic_unbiased(eval_gram(k, xb, xb), eval_gram(l, rb, rb));
    }
    return summarize(values);
}

BlockEstimate block_mmd_sq(const Matrix& x, const KernelSpec& l, const Matrix& residuals, Index block) {
    std::vector<Index> g0, g1;
    for (Index i = 0; i < x.rows(); ++i) (x(i, 0) == 0.0 ? g0 : g1).push_back(i);
    const Index half = block / 2;
    const Index blocks = static_cast<Index>(std::min(g0.size(), g1.size())) / half;
    std::vector<double> values(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static)
    for (Index b = 0; b < blocks; ++b) {
        const std::vector<Index> i0(g0.begin() + b * half, g0.begin() + (b + 1) * half);
        const std::vector<Index> i1(g1.begin() + b * half, g1.begin() + (b + 1) * half);
        const Matrix p = residuals(i0, Eigen::all), q = residuals(i1, Eigen::all);
        values[static_cast<std::size_t>(b)] =
            mean_off_diagonal(eval_gram(l, p, p)) + mean_off_diagonal(eval_gram(l, q, q)) - 2.0 * eval_gram(l, p, q).mean();
    }
    return summarize(values);
}

OracleSignal oracle_signal(const Model& model, const OracleOptions& opts) {
    OracleSignal out;
    if (opts.exact_null && known_null(model)) return out;
    if (opts.block < 4 || opts.samples < 2 * opts.block) throw Error("oracle needs at least two blocks of four rows");
    const Dataset d = sample(model, opts.samples, derive_seed(opts.seed, StreamTag::oracle_sample));
    const Matrix resid = d.y - true_mean(model, d.w);
    const Index sub = std::min(opts.bandwidth_subsample, opts.samples);
    KernelSpec k = default_x_kernel(model);
    if (k.differentiable()) {
        k = resolve(k, d.x.topRows(sub));
        out.x_bandwidth = k.bandwidth();
    }
    const KernelSpec l = resolve(KernelSpec::gaussian(1), resid.topRows(sub));
    out.residual_bandwidth = l.bandwidth();
    const BlockEstimate est = block_hsic(k, d.x, l, resid, opts.block);
    out.hsic = est.value;
    out.std_error = est.std_error;
    out.norm = std::sqrt(std::max(est.value, 0.0));
    return out;
}

}  // namespace kresid
