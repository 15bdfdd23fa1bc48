#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "decaylab/decay.hpp"
#include "decaylab/grid.hpp"
#include "decaylab/potential.hpp"
#include "decaylab/propagator.hpp"

namespace decaylab {

inline constexpr int kConfigSchemaVersion = 1;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class StateFamily { gaussian, eigenvector, band_limited };

struct StateConfig {
    StateFamily family = StateFamily::gaussian;
    double width = 1.0;      // Gaussian e^{-(x - center)^2 / (4 width^2)}
    double center = 0.0;
    double momentum = 0.0;
    double amplitude = 1.0;
    std::size_t index = 0;   // eigenvector: index into the P band
};

struct ExperimentConfig {
    int schema_version = kConfigSchemaVersion;
    std::string scenario;
    std::string description;
    std::uint64_t seed = 0;
    std::string output_dir;

    Geometry geometry = Geometry::line1d;
    std::size_t n = 128;
    double L = 10.0;
    std::size_t audit_n = 256;

    PotentialFamily potential = PotentialFamily::zero;
    double coupling = 0.0;
    int space_dim = 1;

    double c = 2.0;
    double s = 0.0;

    std::optional<double> band_lo;       // default 1e-3 ||H||
    std::optional<double> band_hi;       // default lambda_max
    std::optional<double> split_m;       // default lambda_min - 1

    bool tb_auto = true;
    double tb_value = 16.0;
    double tb_cap = 64.0;

    Kernel kernel = Kernel::eigenbasis;
    double tolerance = 1e-10;
    double dt = 0.05;

    StateConfig state;

    double t_lo = 10.0;
    std::optional<double> t_max;  // default: reflection window
    double exponent_tolerance = 0.05;
    bool expected_failure = false;
    std::string control_note;

    std::vector<PropId> propositions;
    std::vector<double> group_times = {0.5, 1.0, 2.0};
    bool force_zero_K = false;
    std::vector<std::size_t> ladder;

    SampleFamily samples;
    bool eigenvector_control = true;

    std::map<std::string, std::string> expected;  // prop id -> expected verdict
};

// Both throw ConfigError naming the offending key (and line when known).
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);

// Canonical, key-sorted serialization used for the report echo and the hash.
std::string canonical_config(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace decaylab
