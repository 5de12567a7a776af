#pragma once

#include <filesystem>
#include <string>

#include "frtsim/scenario.hpp"

namespace frtsim::test {

inline std::filesystem::path scenario_path(const std::string& name) {
    return std::filesystem::path(FRTSIM_SCENARIO_DIR) / (name + ".yaml");
}

inline ScenarioFile fixture(const std::string& name) { return load_scenario(scenario_path(name)); }

}  // namespace frtsim::test
