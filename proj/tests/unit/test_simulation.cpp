#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "frtsim/error.hpp"
#include "frtsim/simulation.hpp"
#include "support.hpp"

using namespace frtsim;

namespace {

SimulationInput quiet_island(double duration) {
    SimulationInput in = test::fixture("fig6_dc_fault").input;
    in.events.clear();
    in.config.duration = duration;
    return in;
}

bool discrete(const std::string& col) {
    return col.rfind("frt_", 0) == 0 || col.rfind("lim_", 0) == 0 || col == "events";
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("initialization settles the island dispatch") {
    const SimulationInput in = quiet_island(1.0);
    const SimulationState s = initialize_steady_state(in);
    CHECK(s.island_frequency_hz() == doctest::Approx(50.0).epsilon(1e-12));
    for (const auto& v : s.voltage) {
        CHECK(std::abs(v) >= 0.98);
        CHECK(std::abs(v) <= 1.02 + 1e-9);
    }
    CHECK_FALSE(s.gfm.limited);
    REQUIRE(s.trace.rows.size() == 1);
    CHECK(s.trace.rows[0][0] == 0.0);
    const auto p_wf1 = s.trace.rows[0][s.trace.column("P_wf1")];
    CHECK(p_wf1 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("event-free run holds its operating point") {
    const RunResult r = run_scenario(quiet_island(2.0));
    REQUIRE(r.completed);
    CHECK(r.trace.end_time() == doctest::Approx(2.0));
    for (std::size_t c = 1; c < r.trace.columns.size(); ++c) {
        double lo = r.trace.rows.front()[c], hi = lo;
        for (const auto& row : r.trace.rows) {
            lo = std::min(lo, row[c]);
            hi = std::max(hi, row[c]);
        }
        INFO(r.trace.columns[c]);
        CHECK(hi - lo < 1e-6);
    }
    CHECK(r.markers.empty());
}

TEST_CASE("zero dispatch settles to zero flows") {
    SimulationInput in = quiet_island(0.5);
    for (auto& g : in.gfl) {
        g.p_ref = 0.0;
        g.q_ref = 0.0;
    }
    const RunResult r = run_scenario(in);
    REQUIRE(r.completed);
    const auto& last = r.trace.rows.back();
    CHECK(last[r.trace.column("f_island")] == doctest::Approx(50.0));
    for (const std::string col : {"P_hvdc2", "P_wf1", "P_wf2", "Q_hvdc2", "Q_wf1", "Q_wf2"}) {
        INFO(col);
        CHECK(std::abs(last[r.trace.column(col)]) < 1e-6);
    }
    // the GFM only covers the series loss of the cable charging current
    const double loss = r.final_state.network.resistive_loss(r.final_state.voltage);
    CHECK(loss > 0.0);
    CHECK(last[r.trace.column("P_hvdc1")] == doctest::Approx(loss).epsilon(1e-6));
}

TEST_CASE("over-dispatch is rejected before stepping") {
    SimulationInput in = quiet_island(1.0);
    for (auto& g : in.gfl) {
        if (g.id == "hvdc2") g.p_ref = -0.7;
    }
    try {
        (void)initialize_steady_state(in);
        FAIL("expected an initialization error");
    } catch (const InitializationError& e) {
        CHECK(std::string(e.what()).find("1.3") != std::string::npos);
    }
}

TEST_CASE("trace timing and columns") {
    const RunResult r = run_scenario(quiet_island(0.2));
    const Trace& t = r.trace;
    CHECK(t.columns.front() == "t");
    CHECK(t.has_column("V_isl275"));
    CHECK(t.has_column("frt_wf2"));
    CHECK(t.has_column("lim_hvdc1"));
    const double dt_row = 2e-4 * 5;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(t.rows[i].size() == t.columns.size());
        CHECK(t.rows[i][0] == doctest::Approx(static_cast<double>(i) * dt_row).epsilon(1e-12));
    }
    CHECK(r.stats.steps == 1000);
}

TEST_CASE("DC fault dips now and trips the link after the delay") {
    SimulationInput in = test::fixture("fig6_dc_fault").input;
    in.config.duration = 10.8;
    const RunResult r = run_scenario(in);
    REQUIRE(r.completed);
    REQUIRE(r.markers.size() == 2);
    CHECK(r.markers[0] == EventMarker{10.4, "dc_fault", "hvdc2"});
    CHECK(r.markers[1].kind == "trip_link");
    CHECK(r.markers[1].t == doctest::Approx(10.65));
    CHECK_FALSE(r.final_state.gfl_bind[0].in_service);
    CHECK_FALSE(r.final_state.network.branches()[r.final_state.network.branch_index("tr_hvdc2")].in_service);
    CHECK(r.final_state.network.has_fault("hvdc2"));
}

TEST_CASE("second trip of a link is ignored with a marker") {
    SimulationInput in = quiet_island(0.3);
    in.events = {{0.1, TripLink{"hvdc2"}}, {0.2, TripLink{"hvdc2"}}};
    // the GFM alone cannot carry the stranded power, so cut the wind farms first
    for (auto& g : in.gfl) {
        if (g.role == GflRole::WindFarm) g.p_ref = 0.5;
        if (g.id == "hvdc2") g.p_ref = -0.5;
    }
    const RunResult r = run_scenario(in);
    REQUIRE(r.markers.size() == 2);
    CHECK(r.markers[0].kind == "trip_link");
    CHECK(r.markers[1].kind == "trip_link_ignored");
}

TEST_CASE("clearing a fault that was never applied is a state error") {
    SimulationState s = initialize_steady_state(quiet_island(1.0));
    CHECK_THROWS_AS(fire_event(s, {0.0, ClearAcFault{"isl275"}}), StateError);
    fire_event(s, {0.0, ApplyAcFault{"isl275", {1e4, 0.0}}});
    CHECK_THROWS_AS(fire_event(s, {0.0, ApplyAcFault{"isl275", {1e4, 0.0}}}), StateError);
}

TEST_CASE("unknown identifiers are rejected before stepping") {
    SimulationState s = make_state(quiet_island(1.0));
    CHECK_THROWS_AS(schedule_events(s, {{1.0, ApplyAcFault{"nowhere", {1.0, 0.0}}}}), StructuralError);
    CHECK_THROWS_AS(schedule_events(s, {{1.0, TripLink{"hvdc9"}}}), StructuralError);
    CHECK_THROWS_AS(schedule_events(s, {{-1.0, ClearAcFault{"isl275"}}}), ArgumentError);

    SimulationInput in = quiet_island(1.0);
    in.events = {{0.5, SetDispatch{"ghost", 0.0, 0.0}}};
    CHECK_THROWS_AS(run_scenario(in), StructuralError);
}

TEST_CASE("events are queued in time order, ties in declaration order") {
    SimulationState s = make_state(quiet_island(1.0));
    schedule_events(s, {{0.5, SetDispatch{"wf1", 0.9, 0.0}},
                        {0.2, ApplyAcFault{"isl275", {1.0, 0.0}}},
                        {0.5, SetDispatch{"wf2", 0.8, 0.0}}});
    REQUIRE(s.pending.size() == 3);
    CHECK(s.pending[0].time == 0.2);
    CHECK(std::get<SetDispatch>(s.pending[1].kind).unit == "wf1");
    CHECK(std::get<SetDispatch>(s.pending[2].kind).unit == "wf2");
}

TEST_CASE("step size is bounded") {
    SimulationState s = initialize_steady_state(quiet_island(1.0));
    s.dt = 2e-3;
    CHECK_THROWS_AS(step(s), ArgumentError);
    s.dt = 0.0;
    CHECK_THROWS_AS(step(s), ArgumentError);
}

TEST_CASE("repeated runs are bit-identical") {
    SimulationInput in = test::fixture("fig6_ac_fault").input;
    in.config.duration = 11.0;
    const RunResult a = run_scenario(in);
    const RunResult b = run_scenario(in);
    CHECK(a.trace == b.trace);
    CHECK(a.markers == b.markers);
}

TEST_CASE("no event effect appears before its timestamp") {
    SimulationInput faulted = test::fixture("fig6_ac_fault").input;
    faulted.config.duration = 10.6;
    SimulationInput quiet = faulted;
    quiet.events.clear();
    const RunResult a = run_scenario(faulted);
    const RunResult b = run_scenario(quiet);
    std::size_t compared = 0;
    for (std::size_t i = 0; i < a.trace.rows.size(); ++i) {
        const auto& row = a.trace.rows[i];
        if (row[0] >= 10.4 - 1e-9) {
            CHECK(row[a.trace.column("V_isl275")] < 0.01);
            break;
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (a.trace.columns[c] == "events") continue;
            CHECK(row[c] == b.trace.rows[i][c]);
        }
        ++compared;
    }
    CHECK(compared == 10400);
}

TEST_CASE("current limits and conservation hold through a bolted fault") {
    SimulationInput in = test::fixture("fig6_ac_fault").input;
    in.config.duration = 11.5;
    const RunResult r = run_scenario(in);
    REQUIRE(r.completed);
    CHECK(r.stats.max_current[0] <= 1.2 + 1e-9);
    for (std::size_t i = 0; i < in.gfl.size(); ++i) CHECK(r.stats.max_current[i + 1] <= 1.2 + 1e-9);
    CHECK(r.stats.max_conservation_residual < 1e-8);
    CHECK(r.stats.max_solve_residual < 1e-10);
    const auto frt = r.trace.series("frt_wf1");
    CHECK(std::find(frt.begin(), frt.end(), 1.0) != frt.end());
}

TEST_CASE("a live converter on a floating island stops the run") {
    SimulationInput in = quiet_island(1.0);
    SimulationState s = initialize_steady_state(in);
    // isolate the wind farm cable and drop its charging so nothing grounds wf1
    std::vector<Branch> branches = s.network.branches();
    for (auto& br : branches) br.shunt_susceptance = 0.0;
    std::vector<Bus> buses = s.network.buses();
    s.network = Network(buses, branches);
    s.network.set_branch_in_service("cable_wf1", false);
    s.vs_solver.reset();
    s.cs_solver.reset();
    try {
        step(s);
        FAIL("expected a numerical error");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("{wf1}") != std::string::npos);
    }
}

}
