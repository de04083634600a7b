#include "kresid/report.hpp"

#include "kresid/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace kresid {

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    const auto res = std::to_chars(buf, buf + 16, v, 16);
    std::string s(buf, res.ptr);
    return std::string(16 - s.size(), '0') + s;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(s);
    while (std::getline(is, cell, sep)) out.push_back(cell);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& is) {
    KeyValueConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw Error("config line " + std::to_string(line_no) + ": empty key");
        cfg.values_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open config '" + path + "'");
    return parse(is);
}

std::string KeyValueConfig::get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    try {
        return parse_double(values_.at(key));
    } catch (const Error&) {
        throw Error("config key '" + key + "': not a number '" + values_.at(key) + "'");
    }
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = values_.at(key);
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw Error("config key '" + key + "': not an integer '" + v + "'");
    return out;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = values_.at(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error("config key '" + key + "': not a boolean '" + v + "'");
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key, const std::vector<std::string>& fallback) const {
    if (!has(key)) return fallback;
    std::vector<std::string> out;
    for (const auto& item : split(values_.at(key), ',')) {
        const std::string t = trim(item);
        if (t.empty()) throw Error("config key '" + key + "': empty list element");
        out.push_back(t);
    }
    return out;
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key, const std::vector<double>& fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto& item : get_list(key, {})) {
        try {
            out.push_back(parse_double(item));
        } catch (const Error&) {
            throw Error("config key '" + key + "': not a number '" + item + "'");
        }
    }
    return out;
}

void KeyValueConfig::check_keys(const std::vector<std::string>& known) const {
    for (const auto& [k, v] : values_)
        if (std::find(known.begin(), known.end(), k) == known.end()) throw Error("unknown config key '" + k + "'");
}

std::string KeyValueConfig::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

nlohmann::ordered_json report_json(const InferenceReport& r) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["folds"] = r.folds;
    j["alpha"] = r.alpha;
    j["beta"] = r.beta;
    j["bootstrap"] = r.draws;
    j["seed"] = r.seed;
    j["q_v"] = r.q_v;
    j["q_u"] = r.q_u;
    j["zeta"] = r.zeta;
    j["sigma_sq"] = r.sigma_sq;
    j["triangle_ci"] = {r.triangle.lo, r.triangle.hi};
    j["delta_ci"] = {r.delta.lo, r.delta.hi};
    j["union_ci"] = {{"interval", {r.union_set.interval.lo, r.union_set.interval.hi}}, {"with_zero", r.union_set.with_zero}};
    j["diagnostic"] = r.diagnostic ? nlohmann::ordered_json(*r.diagnostic) : nlohmann::ordered_json(nullptr);
    j["reject"] = r.reject;
    j["p_value"] = r.p_value;
    return j;
}

nlohmann::ordered_json pipeline_json(const PipelineResult& r, const std::string& config_hash) {
    nlohmann::ordered_json j;
    j["config_hash"] = config_hash;
    j["report"] = report_json(r.report);
    j["x_bandwidth"] = r.x_bandwidth;
    j["residual_bandwidth"] = r.residual_bandwidth;
    j["lambda_m"] = r.lambda_m;
    j["lambda_v"] = r.lambda_v;
    return j;
}

namespace {

const char* const report_columns[] = {"n",          "folds",       "alpha",       "beta",        "bootstrap",
                                      "seed",       "q_v",         "q_u",         "zeta",        "sigma_sq",
                                      "triangle_lo", "triangle_hi", "delta_lo",   "delta_hi",    "union_with_zero",
                                      "diagnostic", "reject",      "p_value"};

}  // namespace

std::string report_csv_header() {
    std::string out;
    for (const char* c : report_columns) {
        if (!out.empty()) out += ',';
        out += c;
    }
    return out;
}

std::string report_csv_row(const InferenceReport& r) {
    const std::vector<std::string> cells = {std::to_string(r.n),
                                            std::to_string(r.folds),
                                            format_double(r.alpha),
                                            format_double(r.beta),
                                            std::to_string(r.draws),
                                            std::to_string(r.seed),
                                            format_double(r.q_v),
                                            format_double(r.q_u),
                                            format_double(r.zeta),
                                            format_double(r.sigma_sq),
                                            format_double(r.triangle.lo),
                                            format_double(r.triangle.hi),
                                            format_double(r.delta.lo),
                                            format_double(r.delta.hi),
                                            r.union_set.with_zero ? "1" : "0",
                                            r.diagnostic ? format_double(*r.diagnostic) : "",
                                            r.reject ? "1" : "0",
                                            format_double(r.p_value)};
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    return out;
}

InferenceReport parse_report_csv_row(const std::string& line) {
    const auto cells = split(trim(line), ',');
    if (cells.size() != std::size(report_columns))
        throw Error("report row has " + std::to_string(cells.size()) + " fields, expected " +
                    std::to_string(std::size(report_columns)));
    auto integer = [&](std::size_t i) {
        unsigned long long v = 0;
        const auto& s = cells[i];
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw Error(std::string("report column ") + report_columns[i] + ": not an integer '" + s + "'");
        return v;
    };
    auto real = [&](std::size_t i) {
        try {
            return parse_double(cells[i]);
        } catch (const Error&) {
            throw Error(std::string("report column ") + report_columns[i] + ": not a number '" + cells[i] + "'");
        }
    };
    auto flag = [&](std::size_t i) { return integer(i) != 0; };
    InferenceReport r;
    r.n = static_cast<Index>(integer(0));
    r.folds = static_cast<int>(integer(1));
    r.alpha = real(2);
    r.beta = real(3);
    r.draws = static_cast<int>(integer(4));
    r.seed = integer(5);
    r.q_v = real(6);
    r.q_u = real(7);
    r.zeta = real(8);
    r.sigma_sq = real(9);
    r.triangle = {real(10), real(11)};
    r.delta = {real(12), real(13)};
    r.union_set = {r.delta, flag(14)};
    if (!cells[15].empty()) r.diagnostic = real(15);
    r.reject = flag(16);
    r.p_value = real(17);
    return r;
}

}  // namespace kresid
