#include "frtsim/coordination.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "frtsim/error.hpp"

namespace frtsim {

void DispatchPlan::validate() const {
    if (n_wf < 1) throw ArgumentError("dispatch plan needs at least one wind farm");
    if (p_exp_mw < 0.0) throw ArgumentError("total GFL export must be non-negative");
    if (!(p_gfm_nom_mw > 0.0)) throw ArgumentError("GFM nominal capacity must be positive");
    if (p_gfm_0_mw < 0.0 || p_gfm_0_mw > p_gfm_nom_mw * (1.0 + 1e-12)) {
        throw ArgumentError("pre-fault GFM export must lie in [0, nominal]");
    }
    if (!(k_gfm > 0.0)) throw ArgumentError("k_gfm must be positive");
    if (!(f0_hz > 0.0)) throw ArgumentError("f0 must be positive");
    if (!(overload_factor >= 1.0)) throw ArgumentError("overload factor must be at least 1");
    if (wf_dispatch_mw.size() != static_cast<std::size_t>(n_wf)) {
        throw ArgumentError("wf_dispatch must list one value per wind farm");
    }
    for (double w : wf_dispatch_mw) {
        if (w < 0.0) throw ArgumentError("wind farm dispatch must be non-negative");
    }
    const double total_wf = std::accumulate(wf_dispatch_mw.begin(), wf_dispatch_mw.end(), 0.0);
    if (std::abs(total_wf - p_exp_mw - p_gfm_0_mw) > 1e-6 * std::max(1.0, total_wf)) {
        throw ArgumentError("pre-fault balance violated: sum of WF dispatch != p_exp + p_gfm_0");
    }
    if (!links.empty()) {
        double sum = 0.0;
        for (const auto& l : links) {
            if (l.export_mw < 0.0) throw ArgumentError("link '" + l.id + "' has negative export");
            sum += l.export_mw;
        }
        if (std::abs(sum - p_exp_mw) > 1e-6 * std::max(1.0, p_exp_mw)) {
            throw ArgumentError("per-link exports do not sum to p_exp");
        }
    }
}

double max_frequency_deviation(const DispatchPlan& plan, GainFormula formula) {
    const double base = plan.k_gfm * plan.f0_hz;
    return formula == GainFormula::Literal ? base * plan.overload_factor : base;
}

double compute_gfl_droop_gain(const DispatchPlan& plan, GainFormula formula) {
    plan.validate();
    const double df_max = max_frequency_deviation(plan, formula);
    if (!(df_max > 0.0)) throw ArgumentError("maximum frequency deviation must be positive");
    const double surplus = plan.surplus_mw();
    if (surplus <= 0.0) return 0.0;
    return surplus / (plan.n_wf * df_max);
}

double gfm_export_at(const DispatchPlan& plan, double f_hz) {
    const double span = max_frequency_deviation(plan, GainFormula::DeadbandConsistent);
    const double df = std::clamp(f_hz - plan.f0_hz, 0.0, span);
    return plan.p_gfm_nom_mw + (df / span) * (plan.gfm_limit_mw() - plan.p_gfm_nom_mw);
}

namespace {

std::vector<double> wf_outputs_at(const DispatchPlan& plan, double k_gfl, double f_hz) {
    std::vector<double> out;
    out.reserve(plan.wf_dispatch_mw.size());
    for (double w : plan.wf_dispatch_mw) out.push_back(std::max(0.0, w - k_gfl * (f_hz - plan.f0_hz)));
    return out;
}

EquilibriumPrediction make_prediction(const DispatchPlan& plan, double k_gfl, double f_hz,
                                      double gfm_export, bool feasible) {
    EquilibriumPrediction p;
    p.frequency_hz = f_hz;
    p.gfm_export_mw = gfm_export;
    p.wf_outputs_mw = wf_outputs_at(plan, k_gfl, f_hz);
    for (std::size_t i = 0; i < p.wf_outputs_mw.size(); ++i) {
        p.delta_p_mw.push_back(plan.wf_dispatch_mw[i] - p.wf_outputs_mw[i]);
    }
    p.feasible = feasible;
    return p;
}

}  // namespace

EquilibriumPrediction predict_post_fault_equilibrium(const DispatchPlan& plan, double k_gfl_mw_per_hz,
                                                     double tripped_export_mw) {
    plan.validate();
    if (k_gfl_mw_per_hz < 0.0) throw ArgumentError("droop gain must be non-negative");
    if (tripped_export_mw < 0.0 || tripped_export_mw > plan.p_exp_mw * (1.0 + 1e-12)) {
        throw ArgumentError("tripped export must lie in [0, p_exp]");
    }
    const double remaining = std::max(0.0, plan.p_exp_mw - tripped_export_mw);
    const double total_wf = std::accumulate(plan.wf_dispatch_mw.begin(), plan.wf_dispatch_mw.end(), 0.0);
    const double f0 = plan.f0_hz;

    // Deadband: the GFM absorbs the change without moving frequency.
    const double needed_at_f0 = total_wf - remaining;
    if (needed_at_f0 <= plan.p_gfm_nom_mw) {
        const bool feasible = needed_at_f0 >= -plan.p_gfm_nom_mw;
        return make_prediction(plan, k_gfl_mw_per_hz, f0, needed_at_f0, feasible);
    }

    // Balance residual: WF production minus everything that leaves the island.
    // Strictly decreasing in f on the droop interval.
    auto balance = [&](double f) {
        const auto wf = wf_outputs_at(plan, k_gfl_mw_per_hz, f);
        return std::accumulate(wf.begin(), wf.end(), 0.0) - remaining - gfm_export_at(plan, f);
    };
    const double f_max = f0 + max_frequency_deviation(plan, GainFormula::DeadbandConsistent);
    const double g_max = balance(f_max);
    const double tol = 1e-9 * std::max(1.0, total_wf);
    if (std::abs(g_max) <= tol) {
        return make_prediction(plan, k_gfl_mw_per_hz, f_max, plan.gfm_limit_mw(), true);
    }
    if (g_max > 0.0) {
        return make_prediction(plan, k_gfl_mw_per_hz, f_max, plan.gfm_limit_mw(), false);
    }

    double lo = f0;
    double hi = f_max;
    double g_lo = balance(lo);
    double g_hi = g_max;
    for (int it = 0; it < 100 && hi - lo > 1e-6; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g_mid = balance(mid);
        if (g_mid > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    double f_star = g_lo == g_hi ? lo : lo - g_lo * (hi - lo) / (g_hi - g_lo);
    f_star = std::clamp(f_star, lo, hi);
    return make_prediction(plan, k_gfl_mw_per_hz, f_star, gfm_export_at(plan, f_star), true);
}

std::vector<ContingencyResult> check_n1_survivability(const DispatchPlan& plan, double k_gfl_mw_per_hz) {
    plan.validate();
    std::vector<ContingencyResult> out;
    std::vector<LinkExport> links = plan.links;
    if (links.empty()) links.push_back({"gfl_links", plan.p_exp_mw});
    if (links.size() > 1) {
        for (const auto& l : links) {
            out.push_back({"loss of " + l.id, l.export_mw,
                           predict_post_fault_equilibrium(plan, k_gfl_mw_per_hz, l.export_mw)});
        }
    }
    const std::string all_label =
        links.size() == 1 ? "loss of " + links.front().id + " (all GFL links)" : "loss of all GFL links";
    out.push_back({all_label, plan.p_exp_mw,
                   predict_post_fault_equilibrium(plan, k_gfl_mw_per_hz, plan.p_exp_mw)});
    return out;
}

}  // namespace frtsim
