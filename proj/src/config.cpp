#include "tqsvd/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tqsvd/errors.hpp"

namespace tqsvd {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': '" + value + "' is not a number");
    }
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        if (!value.empty() && value[0] == '-') throw std::invalid_argument(value);
        std::uint64_t v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': '" + value + "' is not a nonnegative integer");
    }
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.empty()) throw config_error("key '" + key + "': empty list");
    return out;
}

// Every key the suites may consult, with its validation rule.
void validate_known(const std::string& key, const std::string& value) {
    auto positive_size = [&] {
        if (parse_unsigned(key, value) == 0)
            throw config_error("key '" + key + "' must be positive");
    };
    auto unit_interval = [&](bool open_zero) {
        double v = parse_double(key, value);
        if (v > 1.0 || v < 0.0 || (open_zero && v == 0.0))
            throw config_error("key '" + key + "' must lie in " +
                               (open_zero ? std::string("(0, 1]") : std::string("[0, 1]")));
    };
    if (key == "kind") {
        experiment_kind_from_string(value);
    } else if (key == "seed" || key == "shots" || key == "user" || key == "context") {
        parse_unsigned(key, value);
    } else if (key == "n" || key == "n1" || key == "n2" || key == "n3" || key == "k" ||
               key == "t_bits" || key == "trials" || key == "instances") {
        positive_size();
    } else if (key == "p" || key == "delta") {
        unit_interval(true);
    } else if (key == "gamma" || key == "zeta") {
        unit_interval(false);
    } else if (key == "sigma") {
        if (parse_double(key, value) < 0.0)
            throw config_error("key 'sigma' must be nonnegative");
    } else if (key == "eps") {
        for (double e : parse_list(key, value))
            if (e < 0.0) throw config_error("key 'eps' entries must be nonnegative");
    } else if (key == "mode") {
        if (value != "oracle" && value != "circuit")
            throw config_error("key 'mode' must be 'oracle' or 'circuit'");
    } else if (key == "out_json" || key == "out_csv") {
        if (value.empty()) throw config_error("key '" + key + "' must name a path");
    } else {
        throw config_error("unknown key '" + key + "'");
    }
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw config_error("line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, value).second)
            throw config_error("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    return kv;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::tsvd_verify: return "tsvd-verify";
        case ExperimentKind::qsve_verify: return "qsve-verify";
        case ExperimentKind::recsys: return "recsys";
        case ExperimentKind::completion: return "completion";
    }
    throw std::logic_error("unreachable");
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    if (name == "tsvd-verify") return ExperimentKind::tsvd_verify;
    if (name == "qsve-verify") return ExperimentKind::qsve_verify;
    if (name == "recsys") return ExperimentKind::recsys;
    if (name == "completion") return ExperimentKind::completion;
    throw config_error("unknown experiment kind '" + name +
                       "' (expected tsvd-verify, qsve-verify, recsys, or completion)");
}

std::size_t ExperimentConfig::size_or(const std::string& key, std::size_t fallback) const {
    auto it = raw.find(key);
    return it == raw.end() ? fallback
                           : static_cast<std::size_t>(parse_unsigned(key, it->second));
}

double ExperimentConfig::double_or(const std::string& key, double fallback) const {
    auto it = raw.find(key);
    return it == raw.end() ? fallback : parse_double(key, it->second);
}

std::string ExperimentConfig::string_or(const std::string& key,
                                        const std::string& fallback) const {
    auto it = raw.find(key);
    return it == raw.end() ? fallback : it->second;
}

std::vector<double> ExperimentConfig::double_list_or(const std::string& key,
                                                     std::vector<double> fallback) const {
    auto it = raw.find(key);
    return it == raw.end() ? fallback : parse_list(key, it->second);
}

ExperimentConfig parse_experiment_config(const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) validate_known(key, value);
    if (!kv.count("kind")) throw config_error("missing mandatory key 'kind'");
    if (!kv.count("seed")) throw config_error("missing mandatory key 'seed' (runs must be seeded)");
    ExperimentConfig cfg;
    cfg.raw = kv;
    cfg.kind = experiment_kind_from_string(kv.at("kind"));
    cfg.seed = parse_unsigned("seed", kv.at("seed"));
    cfg.out_json = cfg.string_or("out_json", "");
    cfg.out_csv = cfg.string_or("out_csv", "");
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    return parse_experiment_config(parse_config_file(path));
}

}  // namespace tqsvd
