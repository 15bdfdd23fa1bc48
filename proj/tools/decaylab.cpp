#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "decaylab/config.hpp"
#include "decaylab/matrix_io.hpp"
#include "decaylab/runner.hpp"
#include "decaylab/scenarios.hpp"

using namespace decaylab;

namespace {

std::vector<ExperimentConfig> gather(const std::vector<std::string>& paths,
                                     const std::vector<std::string>& names) {
    std::vector<ExperimentConfig> out;
    for (const auto& p : paths) out.push_back(load_config(p));
    for (const auto& n : names) out.push_back(bundled_config(n));
    if (out.empty()) throw ConfigError("nothing to run: pass --config or --scenario");
    return out;
}

std::string default_out() {
    const char* env = std::getenv("DECAYLAB_OUT");
    return env && *env ? env : "decaylab-runs";
}

void print_summary(const ExperimentConfig& cfg, const RunReport& r) {
    std::cout << cfg.scenario << "  [" << r.verdicts.at("config_hash").get<std::string>() << "]\n";
    for (const auto& c : r.verdicts.at("checks")) {
        std::cout << "  " << std::left << std::setw(9) << c.at("id").get<std::string>()
                  << c.at("verdict").get<std::string>();
        const auto& d = c.at("data");
        if (d.contains("fit")) std::cout << "  slope=" << d.at("fit").at("slope");
        if (c.contains("expected")) std::cout << "  (expected " << c.at("expected").get<std::string>() << ")";
        std::cout << '\n';
    }
    std::cout << "  aggregate " << r.verdicts.at("aggregate").get<std::string>();
    if (!r.run_dir.empty()) std::cout << "  -> " << r.run_dir;
    std::cout << '\n';
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return nlohmann::json::parse(in);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decaylab: finite-grid decay experiments"};
    app.require_subcommand(1);

    std::vector<std::string> configs, scenarios;
    std::string out = default_out();
    std::uint64_t seed = 0;
    unsigned jobs = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", configs, "experiment config file")->check(CLI::ExistingFile);
        sub->add_option("--scenario", scenarios, "bundled scenario name");
        sub->add_option("--out", out, "output root (default $DECAYLAB_OUT)");
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--jobs", jobs, "parallel scenarios")->check(CLI::PositiveNumber);
    };

    CLI::App* run = app.add_subcommand("run", "run experiments");
    add_common(run);
    CLI::App* audit = app.add_subcommand("audit", "run the assumption audits only");
    add_common(audit);

    CLI::App* list = app.add_subcommand("list", "list bundled scenarios");
    std::string filter;
    list->add_option("filter", filter, "substring filter");

    CLI::App* compare = app.add_subcommand("compare", "diff two reports");
    std::string report_a, report_b;
    double threshold = 1e-9;
    compare->add_option("first", report_a)->required()->check(CLI::ExistingFile);
    compare->add_option("second", report_b)->required()->check(CLI::ExistingFile);
    compare->add_option("--threshold", threshold, "relative drift threshold");

    CLI::App* dump = app.add_subcommand("dump-operator", "write an operator matrix");
    std::string which = "H", format = "bin", target;
    std::size_t dump_n = 0;
    dump->add_option("--config", configs)->check(CLI::ExistingFile);
    dump->add_option("--scenario", scenarios);
    dump->add_option("--operator", which, "H, A, K, P or B")
        ->check(CLI::IsMember({"H", "A", "K", "P", "B"}));
    dump->add_option("--format", format)->check(CLI::IsMember({"bin", "csv"}));
    dump->add_option("--n", dump_n, "grid size override");
    dump->add_option("-o,--output", target)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            const auto rows = list_scenarios(filter);
            std::cout << std::left << std::setw(22) << "name" << std::setw(22) << "checks" << "expected\n";
            for (const auto& r : rows) {
                std::cout << std::setw(22) << r.name << std::setw(22) << r.propositions << r.expected << '\n';
            }
            return 0;
        }
        if (compare->parsed()) {
            const CompareResult r = compare_runs(read_json(report_a), read_json(report_b), threshold);
            for (const auto& l : r.lines) std::cout << l << '\n';
            return r.exit_code;
        }
        if (dump->parsed()) {
            ExperimentConfig cfg = gather(configs, scenarios).front();
            const std::size_t n = dump_n ? dump_n : std::min<std::size_t>(cfg.n, 1024);
            const ExactAlgebra ex = build_exact_algebra(cfg, n);
            const HermitianOperator* op = nullptr;
            if (which == "H") op = &ex.H;
            else if (which == "A") op = &ex.A;
            else if (which == "K") op = &ex.K;
            else if (which == "P") op = &ex.P;
            else op = &ex.conj.B_h;
            if (format == "bin") write_operator_binary(target, *op);
            else write_operator_csv(target, *op);
            std::cout << "wrote " << which << " (n = " << n << ") to " << target << '\n';
            return 0;
        }
        RunOptions opts;
        opts.out_root = out;
        if (run->count("--seed") || audit->count("--seed")) opts.seed = seed;
        opts.audit_only = audit->parsed();
        const auto cfgs = gather(configs, scenarios);
        const auto reports = run_batch(cfgs, opts, jobs);
        int code = 0;
        for (std::size_t k = 0; k < reports.size(); ++k) {
            print_summary(cfgs[k], reports[k]);
            if (reports[k].exit_code == 2 || (reports[k].exit_code == 3 && code == 0)) code = reports[k].exit_code;
        }
        return code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
