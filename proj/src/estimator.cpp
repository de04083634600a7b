#include "kresid/estimator.hpp"

#include <utility>

namespace kresid {

Matrix center_block(const Matrix& a, const std::vector<Index>& v1, const std::vector<Index>& v2,
                    const std::vector<Index>& c1, const std::vector<Index>& c2) {
    const RowVector col_mean = a(c1, v2).colwise().mean();
    const Vector row_mean = a(v1, c2).rowwise().mean();
    const double grand = a(c1, c2).mean();
    Matrix out = a(v1, v2);
    out.rowwise() -= col_mean;
    out.colwise() -= row_mean;
    out.array() += grand;
    return out;
}

GramStore::GramStore(const Dataset& data, const FoldNuisance& nuisance, const KernelSpec& k) : nuisance_(nuisance) {
    if (data.n() != nuisance.plan.n()) throw Error("GramStore: dataset and fold plan sizes differ");
    kx_ = eval_gram(k, data.x, data.x);
    assemble();
}

Matrix GramStore::residual_gram(int k1, int k2) const {
    return eval_gram(nuisance_.l, fit(k1).residuals, fit(k2).residuals);
}

Matrix GramStore::r_x(int k1, int k2) const {
    const FoldPlan& p = plan();
    return center_block(kx_, p.members(k1), p.members(k2), p.complement(k1), p.complement(k2));
}

Matrix GramStore::r_xi(int k1, int k2) const {
    const FoldPlan& p = plan();
    return center_block(residual_gram(k1, k2), p.members(k1), p.members(k2), p.complement(k1), p.complement(k2));
}

// sum_j Xi^{k2}[j, b] sum_{z' in C2} W^{k2}_j[z', b] (dL_j[z', a] - mean_{c in C1} dL_j[z', c]),
// dL_j[z', z] = d/d(first arg)_j l(R^{k2}_{z'}, R^{k1}_z).
Matrix GramStore::cross_term(int k1, int k2) const {
    const FoldPlan& p = plan();
    const auto &v1 = p.members(k1), &v2 = p.members(k2), &c1 = p.complement(k1), &c2 = p.complement(k2);
    const FoldFit& f2 = fit(k2);
    const Tensor3 grad = eval_grad_gram(nuisance_.l, select_rows(f2.residuals, c2), fit(k1).residuals);
    Matrix out = Matrix::Zero(static_cast<Index>(v1.size()), static_cast<Index>(v2.size()));
    for (int j = 0; j < f2.weights.output_dim(); ++j) {
        const Matrix& d = grad[static_cast<std::size_t>(j)];
        Matrix dc = d(Eigen::all, v1);
        dc.colwise() -= d(Eigen::all, c1).rowwise().mean();
        const Matrix m = dc.transpose() * f2.weights.slice(j)(Eigen::all, v2);
        out += m * f2.residuals(v2, j).asDiagonal();
    }
    return out;
}

Matrix GramStore::r_xi_v(int k1, int k2, Direction dir) const {
    if (dir == Direction::forward) return cross_term(k1, k2);
    return cross_term(k2, k1).transpose();
}

Matrix GramStore::r_v(int k1, int k2) const {
    const FoldPlan& p = plan();
    const auto &v1 = p.members(k1), &v2 = p.members(k2), &c1 = p.complement(k1), &c2 = p.complement(k2);
    const FoldFit &f1 = fit(k1), &f2 = fit(k2);
    const Tensor4 delta = eval_mixed_gram(nuisance_.l, select_rows(f1.residuals, c1), select_rows(f2.residuals, c2));
    const int d = delta.dim;
    std::vector<Matrix> w1(static_cast<std::size_t>(d)), w2(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        w1[static_cast<std::size_t>(j)] = f1.weights.slice(j)(Eigen::all, v1);
        w2[static_cast<std::size_t>(j)] = f2.weights.slice(j)(Eigen::all, v2);
    }
    Matrix out = Matrix::Zero(static_cast<Index>(v1.size()), static_cast<Index>(v2.size()));
    for (int j1 = 0; j1 < d; ++j1) {
        const Matrix left = w1[static_cast<std::size_t>(j1)].transpose();
        for (int j2 = 0; j2 < d; ++j2) {
            const Matrix core = (left * delta(j1, j2)) * w2[static_cast<std::size_t>(j2)];
            out += f1.residuals(v1, j1).asDiagonal() * core * f2.residuals(v2, j2).asDiagonal();
        }
    }
    return out;
}

Matrix GramStore::gram_block(int k1, int k2) const {
    const Matrix inner = r_xi(k1, k2) - cross_term(k1, k2) - cross_term(k2, k1).transpose() + r_v(k1, k2);
    return r_x(k1, k2).cwiseProduct(inner);
}

void GramStore::assemble() {
    const FoldPlan& p = plan();
    const Index n = p.n();
    g_.resize(n, n);
    std::vector<std::pair<int, int>> pairs;
    for (int k1 = 0; k1 < p.folds(); ++k1)
        for (int k2 = k1; k2 < p.folds(); ++k2) pairs.emplace_back(k1, k2);
    const auto count = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < count; ++t) {
        const auto [k1, k2] = pairs[static_cast<std::size_t>(t)];
        Matrix block = gram_block(k1, k2);
        if (k1 == k2) block = (0.5 * (block + block.transpose())).eval();
        g_(p.members(k1), p.members(k2)) = block;
        if (k1 != k2) g_(p.members(k2), p.members(k1)) = block.transpose();
    }
}

double fold_pair_inner(const Matrix& g, const FoldPlan& plan, int k1, int k2, const std::vector<int>& mult1,
                       const std::vector<int>& mult2) {
    const auto &v1 = plan.members(k1), &v2 = plan.members(k2);
    if (!mult1.empty() && mult1.size() != v1.size()) throw Error("multiplicity vector length does not match fold size");
    if (!mult2.empty() && mult2.size() != v2.size()) throw Error("multiplicity vector length does not match fold size");
    CompensatedSum s;
    for (std::size_t b = 0; b < v2.size(); ++b) {
        const double nb = mult2.empty() ? 1.0 : mult2[b];
        if (nb == 0.0) continue;
        for (std::size_t a = 0; a < v1.size(); ++a) {
            const double na = mult1.empty() ? 1.0 : mult1[a];
            s.add(na * nb * g(v1[a], v2[b]));
        }
    }
    return s.value() / (static_cast<double>(v1.size()) * static_cast<double>(v2.size()));
}

namespace {

double total_sum(const Matrix& g) {
    CompensatedSum s;
    for (Index j = 0; j < g.cols(); ++j)
        for (Index i = 0; i < g.rows(); ++i) s.add(g(i, j));
    return s.value();
}

double diagonal_sum(const Matrix& g) {
    CompensatedSum s;
    for (Index i = 0; i < g.rows(); ++i) s.add(g(i, i));
    return s.value();
}

}  // namespace

double v_statistic(const Matrix& g) {
    const auto n = static_cast<double>(g.rows());
    return total_sum(g) / (n * n);
}

double u_statistic(const Matrix& g) {
    const auto n = static_cast<double>(g.rows());
    if (g.rows() < 2) throw Error("U-statistic needs n >= 2");
    return (total_sum(g) - diagonal_sum(g)) / (n * (n - 1.0));
}

CrossFitStatistics cross_fit_statistics(const Matrix& g, const FoldPlan& plan) {
    if (g.rows() != plan.n() || g.cols() != plan.n()) throw Error("Gram matrix does not match the fold plan");
    CrossFitStatistics s;
    const auto n = static_cast<double>(g.rows());
    const double total = total_sum(g);
    s.diagonal_sum = diagonal_sum(g);
    s.q_v = total / (n * n);
    s.q_u = (total - s.diagonal_sum) / (n * (n - 1.0));
    s.pair_inner.resize(plan.folds(), plan.folds());
    for (int k1 = 0; k1 < plan.folds(); ++k1)
        for (int k2 = 0; k2 < plan.folds(); ++k2) s.pair_inner(k1, k2) = fold_pair_inner(g, plan, k1, k2);
    return s;
}

}  // namespace kresid
