#include "frtsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "frtsim/error.hpp"

namespace frtsim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::optional<std::size_t> find_gfl(const SimulationState& s, const std::string& id) {
    for (std::size_t i = 0; i < s.gfl.size(); ++i) {
        if (s.gfl[i].id == id) return i;
    }
    return std::nullopt;
}

std::size_t require_gfl(const SimulationState& s, const std::string& id) {
    if (auto i = find_gfl(s, id)) return *i;
    throw StructuralError("unknown GFL converter '" + id + "'");
}

std::string join(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
    return out;
}

std::vector<std::string> trace_columns(const SimulationState& s) {
    std::vector<std::string> cols{"t", "f_island"};
    for (const auto& b : s.network.buses()) {
        cols.push_back("V_" + b.id);
        cols.push_back("ang_" + b.id);
    }
    for (const char* q : {"P_", "Q_", "I_", "w_", "lim_"}) cols.push_back(q + s.gfm.id);
    for (const auto& g : s.gfl) {
        for (const char* q : {"P_", "Q_", "I_", "w_", "frt_", "lim_"}) cols.push_back(q + g.id);
    }
    cols.push_back("events");
    return cols;
}

void record_row(SimulationState& s) {
    std::vector<double> row;
    row.reserve(s.trace.columns.size());
    row.push_back(s.t());
    row.push_back(s.island_frequency_hz());
    for (const auto& v : s.voltage) {
        row.push_back(std::abs(v));
        row.push_back(std::arg(v));
    }
    {
        const Complex v = s.voltage[s.gfm_bus];
        const Complex sp = v * std::conj(s.gfm_current);
        row.insert(row.end(), {sp.real(), sp.imag(), std::abs(s.gfm_current), gfm_droop(s.gfm),
                               s.gfm.limited ? 1.0 : 0.0});
    }
    for (std::size_t i = 0; i < s.gfl.size(); ++i) {
        const auto& g = s.gfl[i];
        const auto& b = s.gfl_bind[i];
        const Complex sp = s.voltage[b.bus] * std::conj(b.current);
        row.insert(row.end(), {sp.real(), sp.imag(), std::abs(b.current), g.pll.omega,
                               static_cast<double>(static_cast<int>(g.frt_state)), g.limited ? 1.0 : 0.0});
    }
    row.push_back(static_cast<double>(s.events_since_row));
    s.events_since_row = 0;
    s.trace.rows.push_back(std::move(row));
}

// Buses of floating islands that host no live converter carry no current; they are
// pinned to zero voltage with a unit virtual shunt so the solve stays regular.
ComplexMatrix with_dead_islands_grounded(const SimulationState& s, ComplexMatrix y, bool gfm_grounded) {
    std::vector<std::size_t> extra;
    if (gfm_grounded) extra.push_back(s.gfm_bus);
    const auto islands = find_floating_islands(s.network, extra);
    for (const auto& island : islands) {
        bool live = false;
        for (const auto& id : island) {
            const auto bus = s.network.bus_index(id);
            if (bus == s.gfm_bus) live = true;
            for (std::size_t i = 0; i < s.gfl.size(); ++i) {
                if (s.gfl_bind[i].in_service && s.gfl_bind[i].bus == bus) live = true;
            }
        }
        if (live) {
            throw NumericalError("floating island without a grounding path: {" + join(island) + "}");
        }
        for (const auto& id : island) {
            const auto k = static_cast<Eigen::Index>(s.network.bus_index(id));
            y(k, k) += 1.0;
        }
    }
    return y;
}

Complex gfm_norton_admittance(const SimulationState& s) {
    // converter-base impedance to system base
    return s.gfm_scale / s.gfm.filter_impedance;
}

struct NamedValue {
    std::string name;
    double value;
    bool angle;
};

std::vector<NamedValue> controller_states(const SimulationState& s) {
    std::vector<NamedValue> out{{s.gfm.id + ".theta", s.gfm.theta, true},
                                {s.gfm.id + ".emf", s.gfm.emf, false},
                                {s.gfm.id + ".p_measured", s.gfm.p_measured, false}};
    for (const auto& g : s.gfl) {
        out.push_back({g.id + ".pll.theta", g.pll.theta, true});
        out.push_back({g.id + ".pll.omega", g.pll.omega, false});
        out.push_back({g.id + ".pll.integrator", g.pll.integrator, false});
        out.push_back({g.id + ".loop.d", g.power_loop.real(), false});
        out.push_back({g.id + ".loop.q", g.power_loop.imag(), false});
    }
    return out;
}

}  // namespace

std::string event_name(const EventKind& kind) {
    return std::visit(Overloaded{[](const ApplyAcFault&) { return std::string("apply_ac_fault"); },
                                 [](const ClearAcFault&) { return std::string("clear_ac_fault"); },
                                 [](const DcFault&) { return std::string("dc_fault"); },
                                 [](const TripLink&) { return std::string("trip_link"); },
                                 [](const SetDispatch&) { return std::string("set_dispatch"); }},
                      kind);
}

std::string event_target(const EventKind& kind) {
    return std::visit(Overloaded{[](const ApplyAcFault& e) { return e.bus; },
                                 [](const ClearAcFault& e) { return e.bus; },
                                 [](const DcFault& e) { return e.link; },
                                 [](const TripLink& e) { return e.link; },
                                 [](const SetDispatch& e) { return e.unit; }},
                      kind);
}

double SimulationState::island_frequency_hz() const {
    return gfm_droop(gfm) / (2.0 * std::numbers::pi);
}

SimulationState make_state(const SimulationInput& input) {
    input.base.validate();
    const auto& cfg = input.config;
    if (!(cfg.dt > 0.0 && cfg.dt <= 1e-3)) throw ArgumentError("dt must lie in (0, 1 ms]");
    if (cfg.decimate < 1) throw ArgumentError("decimate must be at least 1");
    if (!(cfg.duration >= 0.0)) throw ArgumentError("duration must be non-negative");

    SimulationState s;
    s.dt = cfg.dt;
    s.config = cfg;
    s.base = input.base;
    s.network = input.network;
    for (const auto& b : s.network.buses()) {
        if (!s.base.v_base_v.empty()) (void)s.base.v_base(b.voltage_level);
    }

    s.gfm = input.gfm;
    s.gfm_bus = s.network.bus_index(s.gfm.bus);
    s.gfm_scale = device_to_system_scale(s.gfm.s_rated_va, s.base);
    if (!(std::abs(s.gfm.filter_impedance) > 0.0)) throw ArgumentError("GFM filter impedance must be non-zero");

    s.gfl = input.gfl;
    for (const auto& g : s.gfl) {
        if (g.id == s.gfm.id) throw StructuralError("converter id '" + g.id + "' declared twice");
        GflBinding b;
        b.bus = s.network.bus_index(g.bus);
        b.scale = device_to_system_scale(g.s_rated_va, s.base);
        if (!g.link_branch.empty()) (void)s.network.branch_index(g.link_branch);
        s.gfl_bind.push_back(b);
    }
    for (std::size_t i = 0; i < s.gfl.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (s.gfl[i].id == s.gfl[j].id) throw StructuralError("converter id '" + s.gfl[i].id + "' declared twice");
        }
    }

    // Flat start.
    s.voltage.assign(s.network.size(), Complex{1.0, 0.0});
    s.gfm.theta = 0.0;
    s.gfm.emf = s.gfm.v_mag_ref;
    s.gfm.limited = false;
    for (auto& g : s.gfl) {
        g.pll.theta = 0.0;
        g.pll.omega = g.pll.omega0;
        g.pll.integrator = 0.0;
        g.frt_state = FrtState::Normal;
        g.power_loop = std::conj(Complex{g.p_ref, g.q_ref});
        g.limited = false;
    }
    s.stats.max_current.assign(1 + s.gfl.size(), 0.0);
    s.trace.columns = trace_columns(s);
    return s;
}

void schedule_events(SimulationState& s, std::vector<Event> events) {
    for (const auto& e : events) {
        if (!(e.time >= 0.0)) throw ArgumentError("event time must be non-negative");
        std::visit(Overloaded{[&](const ApplyAcFault& a) { (void)s.network.bus_index(a.bus); },
                              [&](const ClearAcFault& c) { (void)s.network.bus_index(c.bus); },
                              [&](const DcFault& d) {
                                  (void)require_gfl(s, d.link);
                                  if (d.trip_delay < 0.0) throw ArgumentError("trip delay must be non-negative");
                              },
                              [&](const TripLink& t) { (void)require_gfl(s, t.link); },
                              [&](const SetDispatch& d) { (void)require_gfl(s, d.unit); }},
                   e.kind);
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });
    for (auto& e : events) {
        auto pos = std::upper_bound(s.pending.begin(), s.pending.end(), e.time,
                                    [](double t, const Event& x) { return t < x.time; });
        s.pending.insert(pos, std::move(e));
    }
}

SimulationState initialize_steady_state(const SimulationInput& input) {
    SimulationState s = make_state(input);

    double injected = 0.0;  // system pu the GFM has to absorb
    for (std::size_t i = 0; i < s.gfl.size(); ++i) injected += s.gfl[i].p_ref * s.gfl_bind[i].scale;
    const double gfm_need = injected / s.gfm_scale;
    if (std::abs(gfm_need) > s.gfm.p_limit) {
        std::ostringstream os;
        os << "dispatch requires the GFM to carry " << std::abs(gfm_need) << " pu, beyond its thermal limit of "
           << s.gfm.p_limit << " pu";
        throw InitializationError(os.str());
    }

    const auto settle_steps = static_cast<std::size_t>(std::llround(s.config.settle_time / s.dt));
    std::vector<NamedValue> before;
    try {
        for (std::size_t k = 0; k < settle_steps; ++k) {
            if (k + 1 == settle_steps) before = controller_states(s);
            step(s);
        }
    } catch (const NumericalError& e) {
        throw InitializationError(std::string("numerical failure while settling: ") + e.what());
    }
    if (settle_steps > 0) {
        const auto after = controller_states(s);
        double worst = 0.0;
        std::string worst_name;
        for (std::size_t i = 0; i < after.size(); ++i) {
            double d = after[i].value - before[i].value;
            if (after[i].angle) d = std::remainder(d, 2.0 * std::numbers::pi);
            const double rate = std::abs(d) / s.dt;
            if (!(rate <= worst)) {
                worst = rate;
                worst_name = after[i].name;
            }
        }
        if (!(worst < s.config.settle_tolerance)) {
            std::ostringstream os;
            os << "initialization did not settle: largest residual derivative " << worst << " pu/s in "
               << worst_name;
            throw InitializationError(os.str());
        }
    }
    if (s.gfm.limited) throw InitializationError("GFM is current-limited at the end of initialization");

    s.step_index = 0;
    s.stats = RunStats{};
    s.stats.max_current.assign(1 + s.gfl.size(), 0.0);
    s.trace.rows.clear();
    s.markers.clear();
    s.events_since_row = 0;
    record_row(s);
    return s;
}

void fire_event(SimulationState& s, const Event& event) {
    std::string kind = event_name(event.kind);
    std::visit(Overloaded{[&](const ApplyAcFault& a) { s.network.apply_fault(a.bus, a.y_fault); },
                          [&](const ClearAcFault& c) { s.network.clear_fault(c.bus); },
                          [&](const DcFault& d) {
                              const auto i = require_gfl(s, d.link);
                              s.network.apply_fault(s.gfl[i].bus, d.ac_dip_shunt);
                              schedule_events(s, {Event{event.time + d.trip_delay, TripLink{d.link}}});
                          },
                          [&](const TripLink& t) {
                              const auto i = require_gfl(s, t.link);
                              auto& b = s.gfl_bind[i];
                              if (!b.in_service) {
                                  kind = "trip_link_ignored";
                                  return;
                              }
                              b.in_service = false;
                              b.current = Complex{};
                              if (!s.gfl[i].link_branch.empty()) {
                                  s.network.set_branch_in_service(s.gfl[i].link_branch, false);
                              }
                          },
                          [&](const SetDispatch& d) {
                              auto& g = s.gfl[require_gfl(s, d.unit)];
                              g.p_ref = d.p_ref;
                              g.q_ref = d.q_ref;
                          }},
               event.kind);
    s.vs_solver.reset();
    s.cs_solver.reset();
    s.markers.push_back({event.time, kind, event_target(event.kind)});
    ++s.events_since_row;
}

void step(SimulationState& s) {
    const double dt = s.dt;
    if (!(dt > 0.0 && dt <= 1e-3)) throw ArgumentError("dt must lie in (0, 1 ms]");
    const double t_next = static_cast<double>(s.step_index + 1) * dt;

    // (1) events due at or before the end of this step
    while (!s.pending.empty() && s.pending.front().time <= t_next + 1e-9 * dt) {
        const Event e = s.pending.front();
        s.pending.pop_front();
        fire_event(s, e);
    }

    const auto n = static_cast<Eigen::Index>(s.network.size());
    ComplexVector injections = ComplexVector::Zero(n);

    // (2) grid-following units, driven by last step's bus voltage
    for (std::size_t i = 0; i < s.gfl.size(); ++i) {
        auto& g = s.gfl[i];
        auto& b = s.gfl_bind[i];
        if (!b.in_service) continue;
        const Complex v = s.voltage[b.bus];
        g.pll = pll_step(g.pll, v, dt);
        g = frt_transition(std::move(g), std::abs(v));
        g = advance_recovery(std::move(g), dt);
        b.current = gfl_outer_loop(g, v, g.pll.omega, dt);
        injections(static_cast<Eigen::Index>(b.bus)) += b.current * b.scale;
    }

    // (3) grid-forming unit
    const Complex emf = gfm_step(s.gfm, s.voltage[s.gfm_bus], s.gfm_current, dt);

    // (4) network solve, voltage-source mode first
    const Complex y_f = gfm_norton_admittance(s);
    const auto g_idx = static_cast<Eigen::Index>(s.gfm_bus);
    if (!s.vs_solver) {
        ComplexMatrix y = s.network.admittance();
        y(g_idx, g_idx) += y_f;
        s.vs_solver.emplace(with_dead_islands_grounded(s, std::move(y), true));
    }
    ComplexVector rhs = injections;
    rhs(g_idx) += emf * y_f;
    ComplexVector v = s.vs_solver->solve(rhs);
    double residual = s.vs_solver->last_residual();

    const Complex i_unsat = (emf - v(g_idx)) * y_f / s.gfm_scale;
    const CurrentLimitDecision limit = apply_current_limit(s.gfm, i_unsat);
    if (limit.limited) {
        if (!s.cs_solver) s.cs_solver.emplace(with_dead_islands_grounded(s, s.network.admittance(), false));
        rhs = injections;
        rhs(g_idx) += limit.current * s.gfm_scale;
        v = s.cs_solver->solve(rhs);
        residual = s.cs_solver->last_residual();
    }
    s.gfm_current = limit.current;
    injections(g_idx) += s.gfm_current * s.gfm_scale;

    for (Eigen::Index k = 0; k < n; ++k) {
        if (!std::isfinite(v(k).real()) || !std::isfinite(v(k).imag()) ||
            std::abs(v(k)) > s.config.divergence_voltage) {
            std::ostringstream os;
            os << "simulation diverged: |V| at bus '" << s.network.buses()[static_cast<std::size_t>(k)].id
               << "' = " << std::abs(v(k)) << " pu";
            throw NumericalError(os.str());
        }
    }
    s.voltage.assign(v.data(), v.data() + v.size());
    ++s.step_index;

    // (5) measurements and invariants
    s.stats.steps = s.step_index;
    s.stats.max_solve_residual = std::max(s.stats.max_solve_residual, residual);
    s.stats.max_current[0] = std::max(s.stats.max_current[0], std::abs(s.gfm_current));
    for (std::size_t i = 0; i < s.gfl.size(); ++i) {
        s.stats.max_current[i + 1] = std::max(s.stats.max_current[i + 1], std::abs(s.gfl_bind[i].current));
    }
    double injected_power = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) injected_power += (v(k) * std::conj(injections(k))).real();
    const double conservation = std::abs(injected_power - s.network.resistive_loss(s.voltage));
    s.stats.max_conservation_residual = std::max(s.stats.max_conservation_residual, conservation);

    if (s.step_index % static_cast<std::size_t>(s.config.decimate) == 0) record_row(s);
}

RunResult run_scenario(const SimulationInput& input) {
    RunResult result;
    SimulationState s = initialize_steady_state(input);
    schedule_events(s, input.events);
    const auto n_steps = static_cast<std::size_t>(std::llround(s.config.duration / s.dt));
    try {
        while (s.step_index < n_steps) step(s);
        result.completed = true;
    } catch (const NumericalError& e) {
        std::ostringstream os;
        os << "t=" << format_number(static_cast<double>(s.step_index + 1) * s.dt) << " s: " << e.what();
        result.failure = os.str();
    }
    result.trace = s.trace;
    result.markers = s.markers;
    result.stats = s.stats;
    result.final_state = std::move(s);
    return result;
}

}  // namespace frtsim
