#pragma once

#include <string>
#include <vector>

#include "decaylab/config.hpp"

namespace decaylab {

struct ScenarioEntry {
    std::string name;
    std::string yaml;
};

const std::vector<ScenarioEntry>& bundled_scenarios();

// Throws ConfigError for an unknown name.
ExperimentConfig bundled_config(const std::string& name);

struct ScenarioRow {
    std::string name;
    std::string propositions;
    std::string expected;
    std::string description;
};

// Rows whose name contains `filter` (all rows for an empty filter).
std::vector<ScenarioRow> list_scenarios(const std::string& filter = "");

}  // namespace decaylab
