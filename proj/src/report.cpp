#include "tqsvd/report.hpp"

#include <fstream>

#include "tqsvd/errors.hpp"

namespace tqsvd {

namespace {

nlohmann::json check_to_json(const CheckResult& c) {
    return {{"name", c.name},
            {"pass", c.pass},
            {"measured", c.measured},
            {"tolerance", c.tolerance},
            {"detail", c.detail}};
}

CheckResult check_from_json(const nlohmann::json& j) {
    CheckResult c;
    c.name = j.at("name").get<std::string>();
    c.pass = j.at("pass").get<bool>();
    c.measured = j.at("measured").get<double>();
    c.tolerance = j.at("tolerance").get<double>();
    c.detail = j.at("detail").get<std::string>();
    return c;
}

void flatten_into(const nlohmann::json& j, const std::string& prefix,
                  std::vector<std::pair<std::string, std::string>>& out) {
    auto join = [&](const std::string& leaf) {
        return prefix.empty() ? leaf : prefix + "." + leaf;
    };
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) flatten_into(it.value(), join(it.key()), out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten_into(j[i], join(std::to_string(i)), out);
    } else if (j.is_string()) {
        out.emplace_back(prefix, j.get<std::string>());
    } else {
        out.emplace_back(prefix, j.dump());
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

}  // namespace

bool SuiteResult::pass() const {
    if (budget_seconds > 0.0 && seconds > budget_seconds) return false;
    for (const CheckResult& c : checks)
        if (!c.pass) return false;
    return true;
}

bool RunReport::all_pass() const {
    for (const SuiteResult& s : suites)
        if (!s.pass()) return false;
    return true;
}

nlohmann::json RunReport::to_json() const {
    nlohmann::json suites_j = nlohmann::json::array();
    for (const SuiteResult& s : suites) {
        nlohmann::json checks_j = nlohmann::json::array();
        for (const CheckResult& c : s.checks) checks_j.push_back(check_to_json(c));
        suites_j.push_back({{"suite", s.suite},
                            {"pass", s.pass()},
                            {"seconds", s.seconds},
                            {"budget_seconds", s.budget_seconds},
                            {"checks", checks_j}});
    }
    return {{"config", config},
            {"seed", seed},
            {"pass", all_pass()},
            {"total_seconds", total_seconds},
            {"suites", suites_j}};
}

RunReport RunReport::from_json(const nlohmann::json& j) {
    RunReport r;
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.total_seconds = j.at("total_seconds").get<double>();
    for (const nlohmann::json& sj : j.at("suites")) {
        SuiteResult s;
        s.suite = sj.at("suite").get<std::string>();
        s.seconds = sj.at("seconds").get<double>();
        s.budget_seconds = sj.at("budget_seconds").get<double>();
        for (const nlohmann::json& cj : sj.at("checks")) s.checks.push_back(check_from_json(cj));
        r.suites.push_back(std::move(s));
    }
    return r;
}

nlohmann::json RunReport::stable_json() const {
    nlohmann::json j = to_json();
    j.erase("total_seconds");
    for (nlohmann::json& s : j.at("suites")) s.erase("seconds");
    return j;
}

std::vector<std::pair<std::string, std::string>> flatten_json(const nlohmann::json& j) {
    std::vector<std::pair<std::string, std::string>> out;
    flatten_into(j, "", out);
    return out;
}

std::string report_csv(const nlohmann::json& j) {
    std::string csv = "key,value\n";
    for (const auto& [key, value] : flatten_json(j))
        csv += csv_field(key) + "," + csv_field(value) + "\n";
    return csv;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open output file: " + path);
    out << text;
    if (!out) throw config_error("failed writing output file: " + path);
}

void write_report_files(const RunReport& report, const std::string& json_path,
                        const std::string& csv_path) {
    const nlohmann::json j = report.to_json();
    if (!json_path.empty()) write_text_file(json_path, j.dump(2) + "\n");
    if (!csv_path.empty()) write_text_file(csv_path, report_csv(j));
}

}  // namespace tqsvd
