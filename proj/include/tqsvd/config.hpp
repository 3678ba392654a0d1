#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tqsvd {

// Flat key=value text: one pair per line, '#' starts a comment, blank lines
// are skipped.  Lines without '=' and duplicate keys are config_errors.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> parse_config_file(const std::string& path);

enum class ExperimentKind { tsvd_verify, qsve_verify, recsys, completion };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

// Validated experiment description.  `kind` and `seed` are mandatory (runs
// carry no ambient entropy); every other key is optional and falls back to
// the per-suite defaults, but any key that IS present must parse and sit in
// its domain.  The raw pairs are kept verbatim for the report echo.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::tsvd_verify;
    std::uint64_t seed = 0;
    std::string out_json, out_csv;
    std::map<std::string, std::string> raw;

    bool has(const std::string& key) const { return raw.count(key) != 0; }
    std::size_t size_or(const std::string& key, std::size_t fallback) const;
    double double_or(const std::string& key, double fallback) const;
    std::string string_or(const std::string& key, const std::string& fallback) const;
    std::vector<double> double_list_or(const std::string& key,
                                       std::vector<double> fallback) const;
};

ExperimentConfig parse_experiment_config(const std::map<std::string, std::string>& kv);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace tqsvd
