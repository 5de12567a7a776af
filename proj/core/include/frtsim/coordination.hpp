#pragma once

// Offline coordination planning: GFL droop-gain sizing for the worst-case loss of
// every exporting GFL HVDC link, and a lossless post-fault equilibrium predictor
// that doubles as the independent reference for simulated endpoints.
//
// All powers are in MW, frequencies in Hz, gains in MW/Hz.

#include <string>
#include <vector>

namespace frtsim {

enum class GainFormula {
    DeadbandConsistent,  // Δf_max = k_gfm·f0 (frequency at the thermal limit under the overload droop)
    Literal,             // Δf_max = k_gfm·overload_factor·f0 (droop linear in |P| from zero)
};

struct LinkExport {
    std::string id;
    double export_mw = 0.0;

    bool operator==(const LinkExport&) const = default;
};

struct DispatchPlan {
    double p_exp_mw = 0.0;     // total export of GFL HVDC links
    int n_wf = 1;
    double p_gfm_nom_mw = 0.0;
    double p_gfm_0_mw = 0.0;   // pre-fault GFM export magnitude
    double k_gfm = 0.03;       // fractional frequency rise at the thermal limit
    double f0_hz = 50.0;
    std::vector<double> wf_dispatch_mw;
    std::vector<LinkExport> links;  // optional per-link split of p_exp_mw
    double overload_factor = 1.2;

    /// Throws ArgumentError when any plan invariant is violated.
    void validate() const;

    double gfm_limit_mw() const { return overload_factor * p_gfm_nom_mw; }
    double surplus_mw() const { return p_exp_mw - (gfm_limit_mw() - p_gfm_0_mw); }

    bool operator==(const DispatchPlan&) const = default;
};

/// Largest frequency deviation the GFM droop produces at its thermal limit.
double max_frequency_deviation(const DispatchPlan& plan, GainFormula formula = GainFormula::DeadbandConsistent);

/// Uniform P(f) droop gain for each WF, MW/Hz. Zero when the GFM headroom alone
/// absorbs the loss of every exporting link.
double compute_gfl_droop_gain(const DispatchPlan& plan, GainFormula formula = GainFormula::DeadbandConsistent);

struct EquilibriumPrediction {
    double frequency_hz = 0.0;
    double gfm_export_mw = 0.0;
    std::vector<double> wf_outputs_mw;
    std::vector<double> delta_p_mw;  // curtailment per WF
    bool feasible = true;
};

/// GFM export implied by the overload droop at frequency `f_hz` (valid above f0).
double gfm_export_at(const DispatchPlan& plan, double f_hz);

/// Lossless post-trip fixed point of the GFM overload droop and the WF P(f) droops.
/// Bisection on [f0, f0·(1 + k_gfm)] to 1e-6 Hz, polished by a final secant step on
/// the piecewise-linear balance.
EquilibriumPrediction predict_post_fault_equilibrium(const DispatchPlan& plan, double k_gfl_mw_per_hz,
                                                     double tripped_export_mw);

struct ContingencyResult {
    std::string label;
    double tripped_export_mw = 0.0;
    EquilibriumPrediction prediction;
};

/// Loss of each exporting GFL link separately, then of all of them together.
std::vector<ContingencyResult> check_n1_survivability(const DispatchPlan& plan, double k_gfl_mw_per_hz);

}  // namespace frtsim
