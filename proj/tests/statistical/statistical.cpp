// Long Monte-Carlo checks of the qualitative behaviour. Usage: statistical [check...]

#include "kresid/pipeline.hpp"
#include "kresid/report.hpp"
#include "kresid/sweep.hpp"
#include "kresid/synthdata.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

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

KeyValueConfig config_from(const std::string& text) {
    std::istringstream is(text);
    return KeyValueConfig::parse(is);
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
    const double m = (static_cast<double>(x.size()) + 1) / 2;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - m) * (ry[i] - m);
        sxx += (rx[i] - m) * (rx[i] - m);
        syy += (ry[i] - m) * (ry[i] - m);
    }
    return sxx > 0 && syy > 0 ? sxy / std::sqrt(sxx * syy) : 0.0;
}

Outcome permutation_conservative() {
    const auto agg = aggregate(run_sweep(parse_experiment(
        config_from("rho = 0\nn = 500\nreps = 200\nperms = 1000\nmethods = crossfit_perm\nseed = 31\n"))));
    const double rej = agg.front().rejection;
    return {rej <= 0.07, "cross-fitted permutation rejection at rho 0, n 500: " + fmt(rej) + " <= 0.07, R = 200"};
}

Outcome rho_trend() {
    const std::vector<double> rho{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    const auto agg = aggregate(run_sweep(parse_experiment(config_from(
        "rho = 0, 0.1, 0.2, 0.3, 0.4, 0.5\nn = 500\nreps = 200\nmethods = debiased_bootstrap\nseed = 32\n"))));
    std::vector<double> rej;
    std::string list;
    for (const auto& row : agg) {
        rej.push_back(row.rejection);
        list += (list.empty() ? "" : ", ") + fmt(row.rejection, 3);
    }
    const double rs = spearman(rho, rej);
    return {rs > 0, "debiased rejection over rho 0..0.5 at n 500: " + list + "; Spearman " + fmt(rs) + " > 0, R = 200"};
}

std::map<ArrowVerdict, int> arrow_counts(double rho, std::uint64_t master) {
    PipelineConfig p = parse_pipeline(config_from(""));
    std::vector<ArrowVerdict> verdicts(100);
#pragma omp parallel for schedule(dynamic)
    for (int rep = 0; rep < 100; ++rep) {
        const std::uint64_t seed = replication_seed(master, 0, rep);
        PipelineConfig local = p;
        local.seed = seed;
        verdicts[static_cast<std::size_t>(rep)] = run_arrow(gen_causal_pair({rho, 250, seed}).forward, local).verdict;
    }
    std::map<ArrowVerdict, int> counts;
    for (ArrowVerdict v : verdicts) ++counts[v];
    return counts;
}

std::string describe(std::map<ArrowVerdict, int> c) {
    std::string out;
    for (ArrowVerdict v : {ArrowVerdict::forward, ArrowVerdict::reverse, ArrowVerdict::both_rejected, ArrowVerdict::undecided})
        out += std::string(out.empty() ? "" : ", ") + verdict_name(v) + " " + std::to_string(c[v]);
    return out;
}

Outcome arrow_majorities() {
    auto homogeneous = arrow_counts(0.0, 33);
    auto heterogeneous = arrow_counts(0.5, 34);
    const bool a = homogeneous[ArrowVerdict::forward] > 50;
    const bool b = heterogeneous[ArrowVerdict::both_rejected] > 50;
    return {a && b, "rho 0: " + describe(homogeneous) + " (forward majority " + (a ? "yes" : "no") + "); rho 0.5: " +
                        describe(heterogeneous) + " (both_rejected majority " + (b ? "yes" : "no") + "), n 250, R = 100"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, std::pair<std::string, std::function<Outcome()>>> checks = {
        {1, {"permutation baseline conservative", permutation_conservative}},
        {2, {"rejection trend in rho", rho_trend}},
        {3, {"causal arrow verdicts", arrow_majorities}},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    if (selected.empty())
        for (const auto& [id, c] : checks) selected.push_back(id);
    bool all = true;
    for (int id : selected) {
        const auto it = checks.find(id);
        if (it == checks.end()) {
            std::cerr << "unknown check " << id << "\n";
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
        std::cout << "check " << id << " " << (o.pass ? "PASS" : "FAIL") << " " << it->second.first << ": " << o.detail
                  << " [" << fmt(secs, 3) << " s]" << std::endl;
    }
    return all ? 0 : 1;
}
