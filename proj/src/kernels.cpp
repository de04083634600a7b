#include "kresid/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kresid {

KernelSpec KernelSpec::gaussian(int dimension, BandwidthRule rule) {
    KernelSpec s;
    s.family_ = KernelFamily::gaussian;
    s.dimension_ = dimension;
    s.rule_ = rule;
    if (dimension < 1) throw Error("kernel dimension must be positive");
    if (rule.kind == BandwidthRule::Kind::fixed && !(rule.value > 0.0))
        throw Error("gaussian bandwidth must be positive");
    return s;
}

KernelSpec KernelSpec::matern(int dimension, MaternOrder order, BandwidthRule rule) {
    KernelSpec s = gaussian(dimension, rule);
    s.family_ = KernelFamily::matern;
    s.order_ = order;
    return s;
}

KernelSpec KernelSpec::discrete(int dimension) {
    if (dimension < 1) throw Error("kernel dimension must be positive");
    KernelSpec s;
    s.family_ = KernelFamily::discrete;
    s.dimension_ = dimension;
    s.rule_ = BandwidthRule::fixed(0.0);
    return s;
}

bool KernelSpec::resolved() const {
    return family_ == KernelFamily::discrete || rule_.kind == BandwidthRule::Kind::fixed;
}

double KernelSpec::bandwidth() const {
    if (family_ == KernelFamily::discrete) throw Error("discrete kernel has no bandwidth");
    if (rule_.kind != BandwidthRule::Kind::fixed) throw Error("unresolved bandwidth");
    return rule_.value;
}

KernelSpec KernelSpec::with_bandwidth(double value) const {
    if (family_ == KernelFamily::discrete) return *this;
    if (!(value > 0.0) || !std::isfinite(value)) throw Error("bandwidth must be positive and finite");
    KernelSpec s = *this;
    s.rule_ = BandwidthRule::fixed(value);
    return s;
}

KernelSpec KernelSpec::with_dimension(int dimension) const {
    if (dimension < 1) throw Error("kernel dimension must be positive");
    KernelSpec s = *this;
    s.dimension_ = dimension;
    return s;
}

std::string KernelSpec::describe() const {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    switch (family_) {
        case KernelFamily::gaussian: os << "gaussian"; break;
        case KernelFamily::matern: os << (order_ == MaternOrder::five_halves ? "matern52" : "matern72"); break;
        case KernelFamily::discrete: os << "discrete"; return os.str();
    }
    if (rule_.kind == BandwidthRule::Kind::fixed) {
        os.precision(17);
        os << ':' << rule_.value;
    }
    return os.str();
}

KernelSpec parse_kernel(const std::string& text, int dimension) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    BandwidthRule rule = BandwidthRule::median();
    if (colon != std::string::npos) {
        std::istringstream is(text.substr(colon + 1));
        is.imbue(std::locale::classic());
        double v = 0.0;
        if (!(is >> v)) throw Error("bad kernel bandwidth in '" + text + "'");
        rule = BandwidthRule::fixed(v);
    }
    if (name == "gaussian") return KernelSpec::gaussian(dimension, rule);
    if (name == "matern52") return KernelSpec::matern(dimension, MaternOrder::five_halves, rule);
    if (name == "matern72") return KernelSpec::matern(dimension, MaternOrder::seven_halves, rule);
    if (name == "discrete") return KernelSpec::discrete(dimension);
    throw Error("unknown kernel '" + name + "'");
}

double median_pairwise_distance(const Matrix& points) {
    const Index n = points.rows();
    if (n < 2) throw Error("median heuristic needs at least two points");
    const Matrix pt = points.transpose();
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Index j = 1; j < n; ++j)
        for (Index i = 0; i < j; ++i) d.push_back((pt.col(i) - pt.col(j)).norm());
    const std::size_t m = d.size();
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>(m / 2);
    std::nth_element(d.begin(), mid, d.end());
    double med = *mid;
    if (m % 2 == 0) med = 0.5 * (med + *std::max_element(d.begin(), mid));
    return med;
}

double resolve_bandwidth(const KernelSpec& spec, const Matrix& points) {
    if (spec.family() == KernelFamily::discrete) throw Error("discrete kernel has no bandwidth");
    if (spec.rule().kind == BandwidthRule::Kind::fixed) return spec.rule().value;
    if (points.cols() != spec.dimension()) throw Error("dimension mismatch in resolve_bandwidth");
    const double med = median_pairwise_distance(points);
    if (!(med > 0.0)) throw Error("degenerate bandwidth");
    return med;
}

KernelSpec resolve(const KernelSpec& spec, const Matrix& points) {
    if (spec.resolved()) return spec;
    return spec.with_bandwidth(resolve_bandwidth(spec, points));
}

namespace {

// Radial kernels k(u, v) = f(r), r = |u - v|. With d = u - v:
//   grad_j = h(r) d_j,  mixed_jr = -h(r) delta_jr - g(r) d_j d_r,
// where h = f'(r)/r and g = h'(r)/r; both are smooth at r = 0.
struct Radial {
    double f, h, g;
};

struct RadialProfile {
    KernelFamily family;
    MaternOrder order;
    double scale;  // sigma for gaussian, lengthscale for matern

    [[nodiscard]] Radial at(double r2) const {
        if (family == KernelFamily::gaussian) {
            const double inv = 1.0 / (scale * scale);
            const double f = std::exp(-0.5 * r2 * inv);
            return {f, -f * inv, f * inv * inv};
        }
        const double r = std::sqrt(r2);
        if (order == MaternOrder::five_halves) {
            const double a = std::sqrt(5.0) / scale;
            const double ar = a * r;
            const double e = std::exp(-ar);
            const double a2 = a * a;
            return {(1.0 + ar + ar * ar / 3.0) * e, -(a2 / 3.0) * (1.0 + ar) * e, (a2 * a2 / 3.0) * e};
        }
        const double a = std::sqrt(7.0) / scale;
        const double ar = a * r;
        const double e = std::exp(-ar);
        const double a2 = a * a;
        return {(1.0 + ar + 0.4 * ar * ar + ar * ar * ar / 15.0) * e,
                -(a2 / 15.0) * (3.0 + 3.0 * ar + ar * ar) * e,
                (a2 * a2 / 15.0) * (1.0 + ar) * e};
    }
};

double round12(double x) {
    if (x == 0.0 || !std::isfinite(x)) return x;
    const double e = std::floor(std::log10(std::abs(x)));
    const double scale = std::pow(10.0, 11.0 - e);
    return std::nearbyint(x * scale) / scale;
}

void check_inputs(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
    if (a.cols() != spec.dimension() || b.cols() != spec.dimension())
        throw Error("dimension mismatch: kernel dimension " + std::to_string(spec.dimension()) + ", inputs " +
                    std::to_string(a.cols()) + " and " + std::to_string(b.cols()));
    if (!spec.resolved()) throw Error("unresolved bandwidth");
}

void check_differentiable(const KernelSpec& spec) {
    if (!spec.differentiable()) throw Error("derivative requested for discrete-indicator kernel");
}

RadialProfile profile_of(const KernelSpec& spec) { return {spec.family(), spec.order(), spec.bandwidth()}; }

}  // namespace

double kernel_value(const KernelSpec& spec, const RowVector& u, const RowVector& v) {
    if (u.size() != spec.dimension() || v.size() != spec.dimension()) throw Error("dimension mismatch");
    if (!spec.resolved()) throw Error("unresolved bandwidth");
    if (spec.family() == KernelFamily::discrete) {
        for (Index c = 0; c < u.size(); ++c)
            if (round12(u[c]) != round12(v[c])) return 0.0;
        return 1.0;
    }
    return profile_of(spec).at((u - v).squaredNorm()).f;
}

Matrix eval_gram(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
    check_inputs(spec, a, b);
    const Index m = a.rows(), n = b.rows();
    Matrix out(m, n);
    const Matrix at = a.transpose(), bt = b.transpose();
    if (spec.family() == KernelFamily::discrete) {
        const Matrix ar = at.unaryExpr([](double x) { return round12(x); });
        const Matrix br = bt.unaryExpr([](double x) { return round12(x); });
#pragma omp parallel for schedule(static)
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < m; ++i) out(i, j) = (ar.col(i).array() == br.col(j).array()).all() ? 1.0 : 0.0;
        return out;
    }
    const RadialProfile p = profile_of(spec);
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < m; ++i) out(i, j) = p.at((at.col(i) - bt.col(j)).squaredNorm()).f;
    return out;
}

Tensor3 eval_grad_gram(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
    check_inputs(spec, a, b);
    check_differentiable(spec);
    const int d = spec.dimension();
    const Index m = a.rows(), n = b.rows();
    Tensor3 out(static_cast<std::size_t>(d), Matrix(m, n));
    const Matrix at = a.transpose(), bt = b.transpose();
    const RadialProfile p = profile_of(spec);
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < m; ++i) {
            const double h = p.at((at.col(i) - bt.col(j)).squaredNorm()).h;
            for (int c = 0; c < d; ++c) out[static_cast<std::size_t>(c)](i, j) = h * (at(c, i) - bt(c, j));
        }
    }
    return out;
}

Tensor4 eval_mixed_gram(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
    check_inputs(spec, a, b);
    check_differentiable(spec);
    const int d = spec.dimension();
    const Index m = a.rows(), n = b.rows();
    Tensor4 out{d, std::vector<Matrix>(static_cast<std::size_t>(d * d), Matrix(m, n))};
    const Matrix at = a.transpose(), bt = b.transpose();
    const RadialProfile p = profile_of(spec);
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < m; ++i) {
            const Radial q = p.at((at.col(i) - bt.col(j)).squaredNorm());
            for (int r = 0; r < d; ++r) {
                const double dr = at(r, i) - bt(r, j);
                for (int c = 0; c < d; ++c)
                    out(c, r)(i, j) = (c == r ? -q.h : 0.0) - q.g * (at(c, i) - bt(c, j)) * dr;
            }
        }
    }
    return out;
}

Matrix eval_mixed_gram_diagonal(const KernelSpec& spec, const Matrix& a, const Matrix& b, int j) {
    check_inputs(spec, a, b);
    check_differentiable(spec);
    if (j < 0 || j >= spec.dimension()) throw Error("coordinate out of range");
    const Index m = a.rows(), n = b.rows();
    Matrix out(m, n);
    const Matrix at = a.transpose(), bt = b.transpose();
    const RadialProfile p = profile_of(spec);
#pragma omp parallel for schedule(static)
    for (Index c = 0; c < n; ++c) {
        for (Index i = 0; i < m; ++i) {
            const Radial q = p.at((at.col(i) - bt.col(c)).squaredNorm());
            const double dj = at(j, i) - bt(j, c);
            out(i, c) = -q.h - q.g * dj * dj;
        }
    }
    return out;
}

}  // namespace kresid
