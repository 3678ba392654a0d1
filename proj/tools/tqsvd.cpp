// Command-line front end: experiment runs, single verification suites,
// synthetic tensor generation, and t-svd factorization of stored tensors.
//
// Exit codes: 0 all checks passed, 1 one or more checks failed,
// 2 configuration / IO / capability errors.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tqsvd/config.hpp"
#include "tqsvd/errors.hpp"
#include "tqsvd/generators.hpp"
#include "tqsvd/report.hpp"
#include "tqsvd/suites.hpp"
#include "tqsvd/tensor_io.hpp"
#include "tqsvd/tsvd.hpp"

namespace {

void print_check(const tqsvd::CheckResult& c) {
    std::cout << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": measured "
              << c.measured << " vs " << c.tolerance;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
}

void print_suite(const tqsvd::SuiteResult& s) {
    std::cout << "suite " << s.suite << " (" << s.seconds << " s, budget " << s.budget_seconds
              << " s)\n";
    for (const tqsvd::CheckResult& c : s.checks) print_check(c);
}

int run_command(const std::string& config_path, const std::string& json_override,
                const std::string& csv_override) {
    tqsvd::ExperimentConfig cfg = tqsvd::load_experiment_config(config_path);
    tqsvd::RunReport report = tqsvd::run_experiment(cfg);
    for (const tqsvd::SuiteResult& s : report.suites) print_suite(s);

    const std::string json_path = json_override.empty() ? cfg.out_json : json_override;
    const std::string csv_path = csv_override.empty() ? cfg.out_csv : csv_override;
    tqsvd::write_report_files(report, json_path, csv_path);
    if (!json_path.empty()) std::cout << "report written: " << json_path << "\n";
    if (!csv_path.empty()) std::cout << "report written: " << csv_path << "\n";

    std::cout << (report.all_pass() ? "ALL CHECKS PASSED" : "CHECKS FAILED") << " ("
              << report.total_seconds << " s)\n";
    return report.all_pass() ? 0 : 1;
}

int verify_command(const std::string& suite, std::uint64_t seed) {
    tqsvd::SuiteResult s = tqsvd::run_suite(suite, seed);
    print_suite(s);
    std::cout << (s.pass() ? "ALL CHECKS PASSED" : "CHECKS FAILED") << "\n";
    return s.pass() ? 0 : 1;
}

int gen_command(const std::string& kind, const std::string& out, std::uint64_t seed,
                std::size_t n, std::size_t n1, std::size_t n2, std::size_t n3, std::size_t k,
                double gamma, const std::vector<std::size_t>& targets) {
    tqsvd::DenseTensor t;
    if (kind == "lowrank") {
        const std::size_t d1 = n1 ? n1 : n, d2 = n2 ? n2 : n, d3 = n3 ? n3 : n;
        if (d1 == 0 || d2 == 0 || d3 == 0)
            throw tqsvd::config_error("gen lowrank needs --n or --n1/--n2/--n3");
        tqsvd::MultiRank mr = targets.empty() ? tqsvd::MultiRank(d3, k) : targets;
        t = tqsvd::generate_low_multirank_tensor(d1, d2, d3, mr, seed);
    } else if (kind == "pref") {
        if (n == 0) throw tqsvd::config_error("gen pref needs --n");
        t = tqsvd::generate_preference_tensor(n, k, gamma, seed);
    } else {
        throw tqsvd::config_error("unknown gen kind: " + kind);
    }
    tqsvd::write_tns_file(out, t);
    std::cout << "wrote " << out << " (" << t.dim(0) << "x" << t.dim(1) << "x" << t.dim(2)
              << ")\n";
    return 0;
}

int tsvd_command(const std::string& in, std::size_t k, const std::string& out_dir) {
    tqsvd::DenseTensor a = tqsvd::read_tns_file(in);
    if (a.order() != 3) throw tqsvd::config_error("tsvd expects an order-3 tensor");
    tqsvd::TSvdFactors f = tqsvd::tsvd(a);
    tqsvd::save_factors(out_dir, f);
    std::cout << "factors written to " << out_dir << "\n";
    if (k > 0) {
        tqsvd::DenseTensor ak = tqsvd::truncate_k(a, k);
        tqsvd::write_tns_file(out_dir + "/truncated.tns", ak);
        std::cout << "rank-" << k << " truncation written (error "
                  << tqsvd::truncation_error(a, k) << ")\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"t-svd toolkit: tensor factorization, simulation, verification"};
    app.require_subcommand(1);

    std::string config_path, json_override, csv_override;
    CLI::App* run = app.add_subcommand("run", "execute the experiment described by a config file");
    run->add_option("--config", config_path, "key=value config file")->required();
    run->add_option("--out-json", json_override, "override the config's JSON report path");
    run->add_option("--out-csv", csv_override, "override the config's CSV report path");

    std::string suite;
    std::uint64_t seed = 1;
    CLI::App* verify = app.add_subcommand("verify", "run one named verification suite");
    verify->add_option("--suite", suite, "suite name (see --list)");
    verify->add_option("--seed", seed, "run seed (default 1)");

    bool list_suites = false;
    verify->add_flag("--list", list_suites, "list suite names and exit");

    std::string gen_kind, gen_out;
    std::uint64_t gen_seed = 0;
    std::size_t gn = 0, gn1 = 0, gn2 = 0, gn3 = 0, gk = 1;
    double ggamma = 1.0;
    std::vector<std::size_t> gtargets;
    CLI::App* gen = app.add_subcommand("gen", "generate a synthetic tensor");
    gen->add_option("--kind", gen_kind, "lowrank | pref")->required();
    gen->add_option("--out", gen_out, "output TNS1 path")->required();
    gen->add_option("--seed", gen_seed, "generator seed")->required();
    gen->add_option("--n", gn, "cube side (pref size, or all dims for lowrank)");
    gen->add_option("--n1", gn1, "first dim (lowrank)");
    gen->add_option("--n2", gn2, "second dim (lowrank)");
    gen->add_option("--n3", gn3, "third dim (lowrank)");
    gen->add_option("--k", gk, "archetypes (pref) or constant slice rank (lowrank)");
    gen->add_option("--gamma", ggamma, "typicality band parameter (pref)");
    gen->add_option("--targets", gtargets, "per-slice rank targets (lowrank)")->delimiter(',');

    std::string tsvd_in, tsvd_out;
    std::size_t tsvd_k = 0;
    CLI::App* ts = app.add_subcommand("tsvd", "factor a stored tensor");
    ts->add_option("--in", tsvd_in, "input TNS1 file")->required();
    ts->add_option("--k", tsvd_k, "also write the multi-rank-k truncation");
    ts->add_option("--out", tsvd_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_command(config_path, json_override, csv_override);
        if (verify->parsed()) {
            if (list_suites) {
                for (const std::string& name : tqsvd::suite_names()) std::cout << name << "\n";
                return 0;
            }
            if (suite.empty()) throw tqsvd::config_error("verify needs --suite or --list");
            return verify_command(suite, seed);
        }
        if (gen->parsed())
            return gen_command(gen_kind, gen_out, gen_seed, gn, gn1, gn2, gn3, gk, ggamma,
                               gtargets);
        if (ts->parsed()) return tsvd_command(tsvd_in, tsvd_k, tsvd_out);
    } catch (const tqsvd::qubit_cap_error& e) {
        std::cerr << "error: " << e.what()
                  << "\nhint: set mode=oracle in the config (or raise TQSVD_QUBIT_CAP) to run "
                     "this scale without the full state vector.\n";
        return 2;
    } catch (const tqsvd::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
