#include <doctest.h>

#include <sstream>

#include "frtsim/error.hpp"
#include "frtsim/plot.hpp"
#include "frtsim/report.hpp"
#include "support.hpp"

using namespace frtsim;

namespace {

// Synthetic run whose trailing window sits exactly on the given endpoint.
RunResult synthetic_run(const ScenarioFile& s, double f, double p_gfm, double p_wf, double wobble = 0.0,
                        double end = -1.0) {
    RunResult r;
    r.completed = end < 0.0;
    Trace& t = r.trace;
    t.columns = {"t", "f_island", "P_hvdc1", "P_hvdc2", "P_wf1", "P_wf2", "lim_hvdc1"};
    const double duration = s.input.config.duration;
    const double stop = end < 0.0 ? duration : end;
    for (int i = 0; i * 0.01 <= stop + 1e-9; ++i) {
        const double time = i * 0.01;
        const double w = (i % 2 ? 1.0 : -1.0) * wobble;
        t.rows.push_back({time, f, p_gfm * (1.0 + w), 0.0, p_wf * (1.0 + w), p_wf * (1.0 + w), 0.0});
    }
    r.stats.max_current = {1.0, 0.0, 1.0, 1.0};
    return r;
}

}  // namespace

TEST_SUITE("report_plot") {

TEST_CASE("endpoint on the prediction passes") {
    const ScenarioFile s = test::fixture("fig6_dc_fault");
    const RunReport rep = emit_run_report(s, synthetic_run(s, 51.49, -1.2 * 0.999, 0.6 * 1.005));
    CHECK(rep.reference == "analytic equilibrium");
    REQUIRE(rep.prediction);
    CHECK(rep.prediction->frequency_hz == doctest::Approx(51.5));
    REQUIRE(rep.checks.size() == 4);
    CHECK(rep.checks[0].error == doctest::Approx(0.01));
    CHECK(rep.checks[1].simulated == doctest::Approx(1440.0 * 0.999));
    CHECK(rep.checks[2].error == doctest::Approx(0.005));
    CHECK(rep.window_begin == doctest::Approx(13.5));
    CHECK(rep.verdict == Verdict::Pass);
    std::ostringstream os;
    write_report(os, rep);
    CHECK(os.str().find("verdict: PASS") != std::string::npos);
}

TEST_CASE("endpoint off the prediction fails") {
    const ScenarioFile s = test::fixture("fig6_dc_fault");
    CHECK(emit_run_report(s, synthetic_run(s, 51.44, -1.2, 0.6)).verdict == Verdict::Fail);
    CHECK(emit_run_report(s, synthetic_run(s, 51.5, -1.2, 0.6 * 1.02)).verdict == Verdict::Fail);
}

TEST_CASE("noisy window is inconclusive") {
    const ScenarioFile s = test::fixture("fig6_dc_fault");
    const RunReport rep = emit_run_report(s, synthetic_run(s, 51.5, -1.2, 0.6, 0.03));
    CHECK(rep.verdict == Verdict::Inconclusive);
}

TEST_CASE("truncated run is inconclusive") {
    const ScenarioFile s = test::fixture("fig6_dc_fault");
    const RunReport rep = emit_run_report(s, synthetic_run(s, 51.5, -1.2, 0.6, 0.0, 10.5));
    CHECK(rep.verdict == Verdict::Inconclusive);
}

TEST_CASE("current limit violation fails") {
    const ScenarioFile s = test::fixture("fig6_dc_fault");
    RunResult r = synthetic_run(s, 51.5, -1.2, 0.6);
    r.stats.max_current[0] = 1.25;
    CHECK(emit_run_report(s, r).verdict == Verdict::Fail);
}

TEST_CASE("infeasible plan that diverged fails with a note") {
    ScenarioFile s = test::fixture("fig6_dc_fault");
    s.coordination.auto_gain = false;
    s.coordination.k_gfl_mw_per_hz = 0.0;
    apply_coordination(s);
    RunResult r = synthetic_run(s, 51.5, -1.2, 1.0, 0.0, 11.0);
    r.failure = "t=11 s: simulation diverged";
    const RunReport rep = emit_run_report(s, r);
    CHECK(rep.verdict == Verdict::Fail);
    CHECK(std::find(rep.notes.begin(), rep.notes.end(), "instability consistent with infeasible plan") !=
          rep.notes.end());
}

TEST_CASE("scenarios without a trip compare against their pre-disturbance point") {
    const ScenarioFile s = test::fixture("fig6_ac_fault");
    const RunReport rep = emit_run_report(s, synthetic_run(s, 50.0, -1.0, 1.0));
    CHECK(rep.reference == "pre-disturbance operating point");
    CHECK_FALSE(rep.prediction);
    CHECK(rep.checks.size() == 5);
    CHECK(rep.verdict == Verdict::Pass);
}

TEST_CASE("plot of an event-free trace") {
    Trace t;
    t.columns = {"t", "f_island", "V_isl275", "P_wf1"};
    for (int i = 0; i <= 100; ++i) t.rows.push_back({i * 0.01, 50.0, 1.0, 0.8});
    const auto panels = default_panels(t);
    REQUIRE(panels.size() == 3);
    std::ostringstream os;
    write_svg(os, t, panels, {});
    const std::string svg = os.str();
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") == std::string::npos);
    std::size_t lines = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++lines;
    CHECK(lines == 3);

    const std::vector<PlotPanel> bad{{"x", {"nope"}}};
    CHECK_THROWS_AS(write_svg(os, t, bad, {}), ArgumentError);
    CHECK_THROWS_AS(write_svg(os, t, std::vector<PlotPanel>{}, {}), ArgumentError);
}

TEST_CASE("plot draws event markers") {
    Trace t;
    t.columns = {"t", "f_island"};
    for (int i = 0; i <= 10; ++i) t.rows.push_back({i * 0.1, 50.0 + 0.01 * i});
    PlotOptions opt;
    opt.title = "a < b";
    opt.markers = {{0.5, "dc_fault", "hvdc2"}};
    std::ostringstream os;
    const std::vector<PlotPanel> panels{{"f", {"f_island"}}};
    write_svg(os, t, panels, opt);
    CHECK(os.str().find("stroke-dasharray") != std::string::npos);
    CHECK(os.str().find("a &lt; b") != std::string::npos);
}

TEST_CASE("trace CSV round-trip and window statistics") {
    Trace t;
    t.columns = {"t", "x"};
    t.rows = {{0.0, 1.0}, {0.5, 2.0}, {1.0, 3.0}, {1.5, 1.0 / 3.0}};
    std::stringstream ss;
    t.write_csv(ss);
    CHECK(ss.str().rfind("t,x\n0,1\n", 0) == 0);
    const Trace back = Trace::read_csv(ss);
    CHECK(back.columns == t.columns);
    CHECK(back.rows[3][1] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    const auto w = window_stats(t, "x", 0.4, 1.1);
    CHECK(w.count == 2);
    CHECK(w.mean == doctest::Approx(2.5));
    CHECK(w.stddev == doctest::Approx(0.5));
    CHECK(format_number(0.1234567891234) == "0.123456789");
    CHECK_THROWS_AS(t.column("y"), ArgumentError);
}

}
