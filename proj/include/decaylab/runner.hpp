#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "decaylab/commutator.hpp"
#include "decaylab/config.hpp"
#include "decaylab/conjugate.hpp"
#include "decaylab/decay.hpp"
#include "decaylab/hamiltonian.hpp"
#include "decaylab/potential.hpp"
#include "decaylab/propagator.hpp"
#include "decaylab/smoothness.hpp"
#include "json.hpp"

namespace decaylab {

inline constexpr int kReportSchemaVersion = 1;

// Grid, operators, spectrum and initial state of a scenario.
struct Assembly {
    Grid grid;
    PotentialSpec potential;
    TridiagonalOperator H;
    TridiagonalOperator A;
    std::shared_ptr<const SpectralData> spectral;
    std::shared_ptr<const Propagator> propagator;
    StateVector u;
    double band_lo = 0.0;
    double band_hi = 0.0;
    double split_m = 0.0;
};

Assembly assemble(const ExperimentConfig& cfg);
Assembly assemble(const ExperimentConfig& cfg, std::size_t n);

// Gaussian (line1d: e^{-(x-x0)^2/(4 w^2)} e^{ikx}; radial3d: r e^{-(r-x0)^2/(4 w^2)}),
// a band eigenvector, or a seeded band-limited sample.
StateVector make_state(const ExperimentConfig& cfg, const Grid& grid, const SpectralData& spectral,
                       double band_lo, double band_hi);

// Dense objects of the modified conjugate operator construction.
struct ExactAlgebra {
    HermitianOperator H;
    HermitianOperator A;
    HermitianOperator P;
    std::shared_ptr<const SpectralData> spectral;
    CommutatorDecomposition decomp;
    HermitianOperator K;  // decomp.K, or zero when forced
    DriftTimeChoice drift_time;
    BhBuildTrace trace;
    ConjugateOperator conj;
};

ExactAlgebra build_exact_algebra(const ExperimentConfig& cfg, std::size_t n);

// Reflection window for a state on the scenario grid (energy cut at the
// 1 - 1e-6 spectral quantile), or the configured override.
double scenario_t_max(const ExperimentConfig& cfg, const Assembly& as, const Vector& state);

DecaySetup decay_setup(const ExperimentConfig& cfg, const Assembly& as, PropId prop, bool audits_pass);

struct RunOptions {
    std::string out_root;  // empty: no files
    std::optional<std::uint64_t> seed;
    bool audit_only = false;
};

struct RunReport {
    nlohmann::json report;    // full report
    nlohmann::json verdicts;  // deterministic part
    std::string run_dir;
    int exit_code = 0;
};

// Exit code: 0 all checks PASS, 2 any FAIL, 3 any VACUOUS (and no FAIL).
int aggregate_exit_code(const std::vector<std::string>& verdicts);

RunReport run_experiment(ExperimentConfig cfg, const RunOptions& options);
std::vector<RunReport> run_batch(const std::vector<ExperimentConfig>& configs,
                                 const RunOptions& options, unsigned jobs);

struct CompareResult {
    std::vector<std::string> lines;
    std::size_t drifts = 0;
    std::size_t flips = 0;
    int exit_code = 0;  // 0 identical, 1 constant drift, 2 verdict flip
};

// Throws std::runtime_error on schema version mismatch.
CompareResult compare_runs(const nlohmann::json& a, const nlohmann::json& b, double threshold = 1e-9);

nlohmann::json environment_fingerprint();

void write_trace_csv(const std::string& path, const DecayTrace& trace);
void write_smoothness_csv(const std::string& path, const SmoothnessSample& sample);

}  // namespace decaylab
