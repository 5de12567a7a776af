#include "frtsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace frtsim {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

namespace {

struct Compared {
    std::string name;
    std::string column;
    double scale;  // trace column -> reported unit
    double expected;
    bool frequency;
    double rating_mw;
};

bool has_trip(const ScenarioFile& s) {
    for (const auto& e : s.input.events) {
        if (std::holds_alternative<DcFault>(e.kind) || std::holds_alternative<TripLink>(e.kind)) return true;
    }
    return false;
}

}  // namespace

RunReport emit_run_report(const ScenarioFile& scenario, const RunResult& run) {
    const auto& in = scenario.input;
    const auto& vs = scenario.verify;
    const Trace& trace = run.trace;
    RunReport report;
    report.scenario = scenario.metadata.name;

    const double duration = in.config.duration;
    report.window_end = duration;
    report.window_begin = duration * (1.0 - vs.window_fraction);

    const double gfm_mva = in.gfm.s_rated_va / 1e6;
    std::vector<Compared> compared;
    bool infeasible = false;

    if (has_trip(scenario)) {
        report.reference = "analytic equilibrium";
        const DispatchPlan plan = dispatch_plan(scenario);
        const auto pred =
            predict_post_fault_equilibrium(plan, scenario.coordination.k_gfl_mw_per_hz, tripped_export_mw(scenario));
        report.prediction = pred;
        infeasible = !pred.feasible;
        compared.push_back({"frequency", "f_island", 1.0, pred.frequency_hz, true, 0.0});
        compared.push_back({"GFM export " + in.gfm.id, "P_" + in.gfm.id, -gfm_mva, pred.gfm_export_mw, false, gfm_mva});
        std::size_t wf = 0;
        for (const auto& g : in.gfl) {
            if (g.role != GflRole::WindFarm) continue;
            const double mva = g.s_rated_va / 1e6;
            compared.push_back({"WF " + g.id, "P_" + g.id, mva, pred.wf_outputs_mw[wf++], false, mva});
        }
    } else {
        report.reference = "pre-disturbance operating point";
        // Reference window: the stretch just before the first event, or the first row.
        double t_first = duration;
        if (!in.events.empty()) t_first = in.events.front().time;
        const double span = std::min(t_first, duration * vs.window_fraction);
        auto pre = [&](const std::string& col) {
            if (trace.rows.empty()) return 0.0;
            if (span <= 0.0) return trace.rows.front()[trace.column(col)];
            return window_stats(trace, col, t_first - span, t_first - 1e-12).mean;
        };
        compared.push_back({"frequency", "f_island", 1.0, pre("f_island"), true, 0.0});
        compared.push_back(
            {"GFM export " + in.gfm.id, "P_" + in.gfm.id, -gfm_mva, -pre("P_" + in.gfm.id) * gfm_mva, false, gfm_mva});
        for (const auto& g : in.gfl) {
            const double mva = g.s_rated_va / 1e6;
            const std::string what = g.role == GflRole::WindFarm ? "WF " : "link ";
            compared.push_back({what + g.id, "P_" + g.id, mva, pre("P_" + g.id) * mva, false, mva});
        }
    }

    const bool truncated = !run.completed || trace.end_time() < duration - 1e-9 * std::max(1.0, duration);
    bool nonstationary = false;
    bool any_fail = false;

    if (!trace.rows.empty()) {
        for (const auto& c : compared) {
            const WindowStats w = window_stats(trace, c.column, report.window_begin, report.window_end);
            QuantityCheck q;
            q.name = c.name;
            q.unit = c.frequency ? "Hz" : "MW";
            q.expected = c.expected;
            q.simulated = w.mean * c.scale;
            q.relative = !c.frequency;
            // powers near zero are judged against 1% of the rating
            const double floor = c.frequency ? 0.0 : 0.01;
            q.spread = w.count ? w.stddev / std::max(std::abs(w.mean), floor) : 0.0;
            if (c.frequency) {
                q.error = std::abs(q.simulated - q.expected);
                q.tolerance = vs.frequency_tol_hz;
            } else {
                q.error = std::abs(q.simulated - q.expected) / std::max(std::abs(q.expected), 0.01 * c.rating_mw);
                q.tolerance = vs.power_rel_tol;
            }
            q.pass = w.count > 0 && q.error <= q.tolerance;
            if (w.count == 0 || q.spread > vs.stationarity_tol) nonstationary = true;
            if (!q.pass) any_fail = true;
            report.checks.push_back(q);
        }
    }

    bool limit_violation = false;
    const double i_lims_gfm = in.gfm.i_limit;
    if (!run.stats.max_current.empty() && run.stats.max_current[0] > i_lims_gfm + 1e-9) limit_violation = true;
    for (std::size_t i = 0; i < in.gfl.size() && i + 1 < run.stats.max_current.size(); ++i) {
        if (run.stats.max_current[i + 1] > in.gfl[i].i_limit + 1e-9) limit_violation = true;
    }
    if (!truncated && !trace.rows.empty()) {
        const WindowStats lim = window_stats(trace, "lim_" + in.gfm.id, report.window_begin, report.window_end);
        if (lim.mean > 0.0) {
            limit_violation = true;
            report.notes.push_back("GFM " + in.gfm.id + " is current-limited in the endpoint window");
        }
    }

    if (infeasible) {
        report.notes.push_back(truncated ? "instability consistent with infeasible plan"
                                         : "plan infeasible: GFM thermal limit exceeded at the predicted equilibrium");
    }
    if (truncated) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "run ended at t=%.6g s, before the endpoint window closed", trace.end_time());
        report.notes.push_back(buf);
        if (!run.failure.empty()) report.notes.push_back(run.failure);
    }
    if (limit_violation) report.notes.push_back("current limit violation detected");
    if (nonstationary && !truncated) report.notes.push_back("endpoint window is not stationary");

    if (infeasible) {
        report.verdict = Verdict::Fail;
    } else if (truncated) {
        report.verdict = Verdict::Inconclusive;
    } else if (limit_violation) {
        report.verdict = Verdict::Fail;
    } else if (nonstationary) {
        report.verdict = Verdict::Inconclusive;
    } else {
        report.verdict = any_fail ? Verdict::Fail : Verdict::Pass;
    }
    return report;
}

void write_report(std::ostream& os, const RunReport& r) {
    char buf[256];
    os << "scenario: " << r.scenario << '\n';
    os << "reference: " << r.reference << '\n';
    std::snprintf(buf, sizeof buf, "window: [%.6g, %.6g] s\n", r.window_begin, r.window_end);
    os << buf;
    if (r.prediction) {
        std::snprintf(buf, sizeof buf, "predicted: f=%.6g Hz, GFM export=%.6g MW, feasible=%s\n",
                      r.prediction->frequency_hz, r.prediction->gfm_export_mw, r.prediction->feasible ? "yes" : "no");
        os << buf;
    }
    for (const auto& q : r.checks) {
        if (q.relative) {
            std::snprintf(buf, sizeof buf, "  %-22s expected %12.6g %-2s simulated %12.6g  error %8.4f%% (tol %.4g%%)  %s\n",
                          q.name.c_str(), q.expected, q.unit.c_str(), q.simulated, 100.0 * q.error,
                          100.0 * q.tolerance, q.pass ? "ok" : "FAIL");
        } else {
            std::snprintf(buf, sizeof buf, "  %-22s expected %12.6g %-2s simulated %12.6g  error %8.4g Hz (tol %.4g Hz)  %s\n",
                          q.name.c_str(), q.expected, q.unit.c_str(), q.simulated, q.error, q.tolerance,
                          q.pass ? "ok" : "FAIL");
        }
        os << buf;
    }
    for (const auto& n : r.notes) os << "note: " << n << '\n';
    os << "verdict: " << to_string(r.verdict) << '\n';
}

}  // namespace frtsim
