#pragma once

// Fixed-step partitioned simulation. Each step:
//   1. fire due events
//   2. GFL units: PLL, FRT state machine, outer loop -> current injections
//   3. GFM: droop/voltage loop -> EMF behind its filter impedance
//   4. network solve with the GFM folded in as a Norton equivalent; if the implied
//      GFM current exceeds its limit, re-solve once with a fixed saturated current
//   5. measurements, invariant checks, trace row

#include <deque>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "frtsim/converter.hpp"
#include "frtsim/network.hpp"
#include "frtsim/per_unit.hpp"
#include "frtsim/trace.hpp"

namespace frtsim {

struct ApplyAcFault {
    std::string bus;
    Complex y_fault{1e4, 0.0};
    bool operator==(const ApplyAcFault&) const = default;
};
struct ClearAcFault {
    std::string bus;
    bool operator==(const ClearAcFault&) const = default;
};
/// AC-side signature of a DC fault on an exporting link: a dip shunt at the link's
/// AC bus now, and a scheduled trip of the link after `trip_delay`.
struct DcFault {
    std::string link;
    double trip_delay = 0.25;
    Complex ac_dip_shunt{};
    bool operator==(const DcFault&) const = default;
};
struct TripLink {
    std::string link;
    bool operator==(const TripLink&) const = default;
};
struct SetDispatch {
    std::string unit;
    double p_ref = 0.0;
    double q_ref = 0.0;
    bool operator==(const SetDispatch&) const = default;
};

using EventKind = std::variant<ApplyAcFault, ClearAcFault, DcFault, TripLink, SetDispatch>;

struct Event {
    double time = 0.0;
    EventKind kind;
    bool operator==(const Event&) const = default;
};

std::string event_name(const EventKind& kind);
std::string event_target(const EventKind& kind);

struct SimConfig {
    double dt = 2e-4;
    double duration = 15.0;
    int decimate = 5;  // steps per trace row
    double settle_time = 2.0;
    double settle_tolerance = 1e-6;  // pu/s on every controller state
    double conservation_tolerance = 1e-8;
    double divergence_voltage = 10.0;  // pu; beyond this the run is declared diverged

    bool operator==(const SimConfig&) const = default;
};

/// Everything a run needs. Converter structs carry their dispatch setpoints.
struct SimulationInput {
    BaseQuantities base;
    Network network;
    GfmConverter gfm;
    std::vector<GflConverter> gfl;
    std::vector<Event> events;
    SimConfig config;

    bool operator==(const SimulationInput&) const = default;
};

struct RunStats {
    std::vector<double> max_current;  // per converter: GFM first, then GFL in declaration order
    double max_conservation_residual = 0.0;
    double max_solve_residual = 0.0;
    std::size_t steps = 0;
};

struct GflBinding {
    std::size_t bus = 0;
    double scale = 1.0;  // converter pu -> system pu
    bool in_service = true;
    Complex current{};  // converter pu, last injected
};

struct SimulationState {
    std::size_t step_index = 0;
    double dt = 2e-4;
    SimConfig config;
    BaseQuantities base;
    Network network;

    GfmConverter gfm;
    std::size_t gfm_bus = 0;
    double gfm_scale = 1.0;
    Complex gfm_current{};  // converter pu

    std::vector<GflConverter> gfl;
    std::vector<GflBinding> gfl_bind;

    std::vector<Complex> voltage;  // system pu, last accepted solve
    std::deque<Event> pending;

    Trace trace;
    std::vector<EventMarker> markers;
    int events_since_row = 0;
    RunStats stats;

    std::optional<LinearSolver> vs_solver;  // network + GFM Norton admittance
    std::optional<LinearSolver> cs_solver;  // network only (GFM saturated)

    double t() const { return static_cast<double>(step_index) * dt; }
    double island_frequency_hz() const;
};

/// Resolves ids and builds the state at flat start (no settling, no events).
SimulationState make_state(const SimulationInput& input);

/// Validates event targets and queues them sorted by time, ties in declaration order.
void schedule_events(SimulationState& state, std::vector<Event> events);

/// Flat start followed by an event-free settle of config.settle_time. Throws
/// InitializationError for an infeasible dispatch or a settle that leaves motion.
SimulationState initialize_steady_state(const SimulationInput& input);

void fire_event(SimulationState& state, const Event& event);

/// One partitioned step of length state.dt. dt must lie in (0, 1 ms].
void step(SimulationState& state);

struct RunResult {
    Trace trace;
    std::vector<EventMarker> markers;
    RunStats stats;
    bool completed = false;
    std::string failure;  // set when a numerical failure stopped the run
    SimulationState final_state;
};

/// Initializes, queues the events and steps to config.duration. A numerical failure
/// ends the run early; the trace then holds every row up to the last good step.
RunResult run_scenario(const SimulationInput& input);

}  // namespace frtsim
