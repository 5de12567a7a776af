#pragma once

// Versioned YAML scenario format. parse_scenario validates everything it reads and
// fills defaults; dump_scenario writes the normalized form, which parses back to an
// identical object.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frtsim/coordination.hpp"
#include "frtsim/simulation.hpp"

namespace frtsim {

inline constexpr int kSchemaVersion = 1;

struct ScenarioMetadata {
    std::string name;
    std::string description;
    bool operator==(const ScenarioMetadata&) const = default;
};

struct CoordinationSettings {
    double k_gfm = 0.03;
    bool auto_gain = true;  // size the WF droop gain at load time
    GainFormula gain_formula = GainFormula::DeadbandConsistent;
    double k_gfl_mw_per_hz = 0.0;  // applied to every wind farm; computed when auto_gain
    bool operator==(const CoordinationSettings&) const = default;
};

struct VerifySettings {
    double frequency_tol_hz = 0.05;
    double power_rel_tol = 0.01;
    double window_fraction = 0.1;    // endpoint window, trailing fraction of the duration
    double stationarity_tol = 0.01;  // max std/|mean| inside the window
    bool operator==(const VerifySettings&) const = default;
};

struct ScenarioFile {
    int schema_version = kSchemaVersion;
    ScenarioMetadata metadata;
    SimulationInput input;  // converters carry their dispatch
    std::optional<double> gfm_dispatch_p;  // optional, checked against the balance
    CoordinationSettings coordination;
    VerifySettings verify;

    bool operator==(const ScenarioFile&) const = default;
};

/// Throws InputError (syntax, with line/column) or InputError naming the violated
/// rule. Non-fatal findings, such as unsorted events, are appended to `warnings`.
ScenarioFile parse_scenario(std::string_view text, std::vector<std::string>* warnings = nullptr);
ScenarioFile load_scenario(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// Normalized YAML: every field explicit, shortest round-trip number formatting.
std::string dump_scenario(const ScenarioFile& scenario);

/// Offline plan in MW implied by the scenario dispatch (lossless pre-fault balance).
DispatchPlan dispatch_plan(const ScenarioFile& scenario);

/// MW/Hz on the island to converter pu per rad/s.
double droop_gain_to_pu(double mw_per_hz, double s_rated_va);

/// Applies coordination.k_gfl_mw_per_hz to every wind farm, recomputing it first
/// when auto_gain is set.
void apply_coordination(ScenarioFile& scenario);

/// Total export (MW) of the GFL links removed by trip or DC-fault events.
double tripped_export_mw(const ScenarioFile& scenario);

}  // namespace frtsim
