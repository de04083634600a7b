#pragma once

#include "kresid/inference.hpp"
#include "kresid/pipeline.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

namespace kresid {

std::uint64_t fnv1a(std::string_view text);
std::string hex64(std::uint64_t v);

// Flat "key = value" configuration; '#' starts a comment. Later assignments
// override earlier ones.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& is);
    static KeyValueConfig parse_file(const std::string& path);

    [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    [[nodiscard]] std::string get(const std::string& key, const std::string& fallback) const;
    [[nodiscard]] double get_double(const std::string& key, double fallback) const;
    [[nodiscard]] long long get_int(const std::string& key, long long fallback) const;
    [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
    // Comma-separated list; the fallback applies when the key is absent.
    [[nodiscard]] std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const;
    [[nodiscard]] std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback) const;

    // Throws naming the first key not in `known`.
    void check_keys(const std::vector<std::string>& known) const;

    // Sorted "key = value" lines; the hash is taken over this text.
    [[nodiscard]] std::string canonical() const;
    [[nodiscard]] std::string hash() const { return hex64(fnv1a(canonical())); }

private:
    std::map<std::string, std::string> values_;
};

nlohmann::ordered_json report_json(const InferenceReport& r);
nlohmann::ordered_json pipeline_json(const PipelineResult& r, const std::string& config_hash);

std::string report_csv_header();
std::string report_csv_row(const InferenceReport& r);
InferenceReport parse_report_csv_row(const std::string& line);

}  // namespace kresid
