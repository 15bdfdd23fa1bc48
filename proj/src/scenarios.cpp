#include "decaylab/scenarios.hpp"

namespace decaylab {

const std::vector<ScenarioEntry>& bundled_scenarios() {
    static const std::vector<ScenarioEntry> entries = {
        {"free-1d-p53", R"(schema_version: 1
scenario: free-1d-p53
description: free line, Gaussian packet, rate -1/2 with the low/high energy split
seed: 1
grid: {geometry: line1d, n: 4096, L: 200}
potential: {family: zero}
band: {lo: 0}
state: {family: gaussian, width: 1}
decay: {t_lo: 10, tolerance: 0.05}
propositions: [AUDIT, P53]
expected: {AUDIT: PASS, P53: PASS}
)"},
        {"free-1d-p63", R"(schema_version: 1
scenario: free-1d-p63
description: free line, u = |H|^(1/2) v with Gaussian v, rate -3/2
seed: 1
grid: {geometry: line1d, n: 4096, L: 200}
potential: {family: zero}
band: {lo: 0}
state: {family: gaussian, width: 1}
decay: {t_lo: 10, t_max: 40, tolerance: 0.05}
propositions: [AUDIT, P63]
expected: {AUDIT: PASS, P63: PASS}
)"},
        {"free-1d-p52", R"(schema_version: 1
scenario: free-1d-p52
description: free line, (2H)^(1/2) P u on the band [0.05, 4], rate -1
seed: 1
grid: {geometry: line1d, n: 4096, L: 200}
potential: {family: zero}
band: {lo: 0.05, hi: 4}
state: {family: gaussian, width: 1}
decay: {t_lo: 5, t_max: 40, tolerance: 0.05}
propositions: [AUDIT, P52]
expected: {AUDIT: PASS, P52: PASS}
)"},
        {"free-1d-p61", R"(schema_version: 1
scenario: free-1d-p61
description: free line, Q u = 2H u with Gaussian u, rate -2
seed: 1
grid: {geometry: line1d, n: 4096, L: 200}
potential: {family: zero}
band: {lo: 0}
state: {family: gaussian, width: 1}
decay: {t_lo: 10, tolerance: 0.05}
propositions: [AUDIT, P61]
expected: {AUDIT: PASS, P61: PASS}
)"},
        {"critical-3d-p71", R"(schema_version: 1
scenario: critical-3d-p71
description: radial 3D, V = 1/(1+r^2), s-wave Gaussian projected above eps0, rate -1/2
seed: 1
grid: {geometry: radial3d, n: 2000, L: 200, audit_n: 256}
potential: {family: critical, coupling: 1, dim: 3}
state: {family: gaussian, width: 1}
decay: {t_lo: 5, t_max: 23, tolerance: 0.1}
propositions: [AUDIT, P71]
expected: {AUDIT: FAIL, P71: VACUOUS}
)"},
        {"exact-algebra-p41", R"(schema_version: 1
scenario: exact-algebra-p41
description: generator identity for the truncated drift at T_B = 16
seed: 1
grid: {geometry: line1d, n: 128, L: 10}
potential: {family: critical, coupling: 1, dim: 1}
commutator: {c: 2, s: 0.5}
drift: {policy: fixed, T: 16}
propositions: [P41]
expected: {P41: PASS}
)"},
        {"exact-algebra-p42", R"(schema_version: 1
scenario: exact-algebra-p42
description: group commutator with the remainder forced to zero
seed: 1
grid: {geometry: line1d, n: 128, L: 10}
potential: {family: zero}
commutator: {c: 2, s: 0.5}
drift: {policy: fixed, T: 16}
force_zero_K: true
group_times: [0.5, 1, 2]
propositions: [P42]
expected: {P42: FAIL}
)"},
        {"kato-morawetz", R"(schema_version: 1
scenario: kato-morawetz
description: "|x|^-1 local decay and |K|^(1/2) smoothing on the critical radial problem"
seed: 1
grid: {geometry: radial3d, n: 2000, L: 200, audit_n: 256}
potential: {family: critical, coupling: 1, dim: 3}
samples: {count: 8, eps_lo: 0.5, e_hi: 4, seed: 1}
eigenvector_control: true
propositions: [MORAWETZ, KATO]
expected: {MORAWETZ: PASS, KATO: FAIL}
)"},
        {"critical-ladder-p44", R"(schema_version: 1
scenario: critical-ladder-p44
description: norm of [A~, B_h] under grid refinement
seed: 1
grid: {geometry: radial3d, n: 256, L: 20}
potential: {family: critical, coupling: 1, dim: 3}
band: {lo: 0.1, hi: 4}
commutator: {c: 2, s: 0.5}
drift: {policy: fixed, T: 16}
ladder: [256, 512, 1024]
propositions: [P44]
expected: {P44: PASS}
)"},
        {"eigenvector-control", R"(schema_version: 1
scenario: eigenvector-control
description: stationary input; the decay checks must fail
seed: 1
grid: {geometry: line1d, n: 512, L: 50}
potential: {family: zero}
band: {lo: 0}
state: {family: eigenvector, index: 40}
decay: {t_lo: 5, t_max: 40, tolerance: 0.05, expected_failure: true, note: "expected: point spectrum violates (Hb) surrogate"}
propositions: [P61, P53]
expected: {P61: FAIL, P53: FAIL}
)"},
    };
    return entries;
}

ExperimentConfig bundled_config(const std::string& name) {
    for (const auto& e : bundled_scenarios()) {
        if (e.name == name) return parse_config(e.yaml);
    }
    throw ConfigError("no bundled scenario named '" + name + "'");
}

std::vector<ScenarioRow> list_scenarios(const std::string& filter) {
    std::vector<ScenarioRow> rows;
    for (const auto& e : bundled_scenarios()) {
        if (!filter.empty() && e.name.find(filter) == std::string::npos) continue;
        const ExperimentConfig cfg = parse_config(e.yaml);
        ScenarioRow row;
        row.name = e.name;
        row.description = cfg.description;
        for (PropId p : cfg.propositions) {
            if (!row.propositions.empty()) row.propositions += ",";
            row.propositions += std::string(to_string(p));
            const auto it = cfg.expected.find(std::string(to_string(p)));
            if (!row.expected.empty()) row.expected += ",";
            row.expected += it == cfg.expected.end() ? "?" : it->second;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace decaylab
