#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace tqsvd {

// One verified property: what was measured against which tolerance.  For
// upper-bound checks `measured <= tolerance` iff pass; count-style checks set
// tolerance 0 and explain themselves in `detail`.
struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

// One named verification suite run: its checks plus the wall-clock budget the
// suite must meet.  A suite passes when every check passes and it ran within
// budget (budget 0 = untimed).
struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;
    double seconds = 0.0;
    double budget_seconds = 0.0;
    bool pass() const;
};

struct RunReport {
    std::map<std::string, std::string> config;  // verbatim echo
    std::uint64_t seed = 0;
    std::vector<SuiteResult> suites;
    double total_seconds = 0.0;

    bool all_pass() const;
    nlohmann::json to_json() const;
    static RunReport from_json(const nlohmann::json& j);

    // The timing-free view: two runs with the same config and seed must agree
    // on this exactly.
    nlohmann::json stable_json() const;
};

// Depth-first key flattening: nested objects join with '.', array elements
// index by position ("suites.0.checks.2.name").
std::vector<std::pair<std::string, std::string>> flatten_json(const nlohmann::json& j);

// Two-column "key,value" export of the flattened report (RFC-4180 quoting).
std::string report_csv(const nlohmann::json& j);

void write_text_file(const std::string& path, const std::string& text);

// Writes whichever paths are nonempty; JSON first so a CSV failure cannot
// leave nothing behind.
void write_report_files(const RunReport& report, const std::string& json_path,
                        const std::string& csv_path);

}  // namespace tqsvd
