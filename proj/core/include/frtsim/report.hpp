#pragma once

// Endpoint verification. A run is compared against the analytic post-trip
// equilibrium when the scenario trips GFL links, otherwise against its own
// pre-disturbance operating point. Endpoints are means over a trailing window.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frtsim/coordination.hpp"
#include "frtsim/scenario.hpp"
#include "frtsim/simulation.hpp"

namespace frtsim {

enum class Verdict { Pass, Fail, Inconclusive };
std::string_view to_string(Verdict v);

struct QuantityCheck {
    std::string name;
    std::string unit;  // "Hz" or "MW"
    double expected = 0.0;
    double simulated = 0.0;
    double error = 0.0;      // absolute for Hz, relative for MW
    double tolerance = 0.0;
    bool relative = false;
    double spread = 0.0;  // window std / |mean|
    bool pass = false;
};

struct RunReport {
    std::string scenario;
    std::string reference;  // "analytic equilibrium" or "pre-disturbance operating point"
    std::optional<EquilibriumPrediction> prediction;
    double window_begin = 0.0;
    double window_end = 0.0;
    std::vector<QuantityCheck> checks;
    std::vector<std::string> notes;
    Verdict verdict = Verdict::Inconclusive;
};

RunReport emit_run_report(const ScenarioFile& scenario, const RunResult& run);

/// Plain-text rendering, one line per compared quantity.
void write_report(std::ostream& os, const RunReport& report);

}  // namespace frtsim
