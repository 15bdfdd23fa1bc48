#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "decaylab/config.hpp"
#include "decaylab/runner.hpp"
#include "decaylab/scenarios.hpp"

using namespace decaylab;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(schema_version: 1
scenario: tiny
seed: 3
grid: {geometry: line1d, n: 64, L: 8}
potential: {family: critical, coupling: 1}
commutator: {s: 0.5}
drift: {policy: fixed, T: 4}
propositions: [P41]
)";

std::string error_of(const std::string& yaml) {
    try {
        parse_config(yaml);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("decaylab_lab_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("minimal config parses with defaults") {
    const ExperimentConfig cfg = parse_config(kMinimal);
    CHECK(cfg.scenario == "tiny");
    CHECK(cfg.seed == 3);
    CHECK(cfg.c == 2.0);
    CHECK(cfg.s == 0.5);
    CHECK_FALSE(cfg.tb_auto);
    CHECK(cfg.tb_value == 4.0);
    REQUIRE(cfg.propositions.size() == 1);
    CHECK(cfg.propositions[0] == PropId::P41);
}

TEST_CASE("config errors name the field and line") {
    std::string e = error_of(std::string(kMinimal) + "toleranse: 1\n");
    CHECK(e.find("toleranse") != std::string::npos);
    CHECK(e.find("line 9") != std::string::npos);

    std::string bad = kMinimal;
    bad.replace(bad.find("[P41]"), 5, "[P41, P99]");
    CHECK_FALSE(error_of(bad).empty());

    std::string noseed = kMinimal;
    noseed.erase(noseed.find("seed: 3\n"), 8);
    CHECK(error_of(noseed).find("seed") != std::string::npos);

    std::string small = kMinimal;
    small.replace(small.find("n: 64"), 5, "n: 4");
    CHECK_FALSE(error_of(small).empty());

    std::string bads = kMinimal;
    bads.replace(bads.find("s: 0.5"), 6, "s: 0.3");
    CHECK(error_of(bads).find("commutator.s") != std::string::npos);

    std::string nested = kMinimal;
    nested.replace(nested.find("T: 4"), 4, "T: 4, Tee: 5");
    CHECK(error_of(nested).find("drift.Tee") != std::string::npos);

    CHECK_FALSE(error_of("schema_version: 2\nseed: 1\npropositions: [P41]\n").empty());
    CHECK_FALSE(error_of("[1, 2").empty());
}

TEST_CASE("config hash ignores the output directory only") {
    ExperimentConfig a = parse_config(kMinimal);
    ExperimentConfig b = a;
    b.output_dir = "/elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 4;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(canonical_config(a) == canonical_config(parse_config(kMinimal)));
}

TEST_CASE("bundled library") {
    const auto rows = list_scenarios();
    std::set<std::string> names;
    for (const auto& r : rows) names.insert(r.name);
    for (const char* n : {"free-1d-p53", "free-1d-p63", "critical-3d-p71", "exact-algebra-p41",
                          "exact-algebra-p42", "kato-morawetz"}) {
        CHECK(names.count(n) == 1);
    }
    CHECK(list_scenarios("").size() == rows.size());
    CHECK(list_scenarios("no-such-thing").empty());
    CHECK(list_scenarios("free-1d").size() == 4);
    for (const auto& entry : bundled_scenarios()) CHECK_NOTHROW(parse_config(entry.yaml));
    CHECK_THROWS(bundled_config("missing"));
}

TEST_CASE("aggregate exit codes") {
    CHECK(aggregate_exit_code({"PASS", "PASS"}) == 0);
    CHECK(aggregate_exit_code({"PASS", "VACUOUS"}) == 3);
    CHECK(aggregate_exit_code({"VACUOUS", "FAIL"}) == 2);
    CHECK(aggregate_exit_code({}) == 0);
}

TEST_CASE("run writes an append-only directory and is deterministic") {
    const fs::path root = scratch("runs");
    RunOptions opts;
    opts.out_root = root.string();
    const ExperimentConfig cfg = parse_config(kMinimal);
    const RunReport a = run_experiment(cfg, opts);
    const RunReport b = run_experiment(cfg, opts);
    CHECK(a.exit_code == 0);
    CHECK(a.run_dir != b.run_dir);
    CHECK(fs::exists(fs::path(a.run_dir) / "report.json"));
    CHECK(fs::exists(fs::path(a.run_dir) / "verdicts.json"));
    CHECK(a.verdicts.dump() == b.verdicts.dump());
    std::ifstream fa(fs::path(a.run_dir) / "verdicts.json"), fb(fs::path(b.run_dir) / "verdicts.json");
    const std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
    CHECK(sa == sb);
    const std::string dir = fs::path(a.run_dir).filename().string();
    CHECK(dir.rfind(a.verdicts.at("config_hash").get<std::string>(), 0) == 0);
    CHECK(a.report.at("schema_version") == kReportSchemaVersion);
    CHECK(a.report.contains("environment"));
    CHECK(a.report.contains("timings"));
    fs::remove_all(root);
}

TEST_CASE("seed override changes only the seed") {
    RunOptions opts;
    opts.seed = 99;
    const RunReport r = run_experiment(parse_config(kMinimal), opts);
    CHECK(r.report.at("config").at("seed") == 99);
    CHECK(r.run_dir.empty());
}

TEST_CASE("decay runs embed the audit section and write traces") {
    const fs::path root = scratch("decay");
    RunOptions opts;
    opts.out_root = root.string();
    const RunReport r = run_experiment(bundled_config("free-1d-p53"), opts);
    CHECK(r.exit_code == 0);
    CHECK(r.verdicts.contains("audit"));
    const auto& checks = r.verdicts.at("checks");
    bool seen = false;
    for (const auto& c : checks) {
        if (c.at("id") == "P53") {
            seen = true;
            const double slope = c.at("data").at("fit").at("slope");
            CHECK(slope >= -0.55);
            CHECK(slope <= -0.45);
        }
    }
    CHECK(seen);
    std::ifstream csv(fs::path(r.run_dir) / "trace-P53.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,re,im,abs,is_envelope");
    fs::remove_all(root);
}

TEST_CASE("sizing error above the spectral cap") {
    std::string big = kMinimal;
    big.replace(big.find("n: 64"), 5, "n: 5000");
    big.replace(big.find("[P41]"), 5, "[AUDIT]");
    CHECK_THROWS(run_experiment(parse_config(big), RunOptions{}));
}

TEST_CASE("compare reports") {
    const RunReport r = run_experiment(parse_config(kMinimal), RunOptions{});
    const nlohmann::json a = r.report;
    CompareResult same = compare_runs(a, a);
    CHECK(same.exit_code == 0);
    REQUIRE(same.lines.size() == 1);
    CHECK(same.lines[0] == "no differences");

    nlohmann::json tiny = a;
    double& v = tiny["verdicts"]["checks"][0]["data"]["scale_K_h"].get_ref<double&>();
    v *= 1.0 + 1e-13;
    CHECK(compare_runs(a, tiny, 1e-9).lines[0] == "no differences");

    nlohmann::json drift = a;
    drift["verdicts"]["checks"][0]["data"]["scale_K_h"] = v * 1.01;
    CHECK(compare_runs(a, drift).exit_code == 1);

    nlohmann::json flip = a;
    flip["verdicts"]["checks"][0]["verdict"] = "FAIL";
    const CompareResult f = compare_runs(a, flip);
    CHECK(f.exit_code == 2);
    CHECK(f.flips == 1);

    nlohmann::json other = a;
    other["schema_version"] = 2;
    CHECK_THROWS(compare_runs(a, other));
}

TEST_CASE("batch keeps the input order") {
    std::vector<ExperimentConfig> cfgs = {parse_config(kMinimal), bundled_config("exact-algebra-p41")};
    const auto out = run_batch(cfgs, RunOptions{}, 2);
    REQUIRE(out.size() == 2);
    CHECK(out[0].verdicts.at("scenario") == "tiny");
    CHECK(out[1].verdicts.at("scenario") == "exact-algebra-p41");
}
