#pragma once

// Averaged (non-switching) converter controllers. Every quantity here is in the
// converter's own per-unit base; the simulation engine rescales to the system base.
//
// Frame convention: all phasors live in one synchronous frame rotating at omega0.
// A PLL or GFM angle therefore integrates (omega - omega0), not omega.

#include <string>
#include <string_view>

#include "frtsim/per_unit.hpp"

namespace frtsim {

enum class FrtState { Normal, FaultRide, Recovery };
enum class GflRole { WindFarm, HvdcLink };

std::string_view to_string(FrtState s);
std::string_view to_string(GflRole r);

/// Synchronous-reference-frame PLL with a PI loop filter.
struct PllState {
    double theta = 0.0;       // rad, relative to the common frame
    double omega = 0.0;       // rad/s, absolute
    double integrator = 0.0;  // rad/s, PI integral part
    double kp = 212.0;
    double ki = 22500.0;
    double omega0 = 2.0 * std::numbers::pi * 50.0;
    double freeze_below = 0.1;  // pu voltage

    bool operator==(const PllState&) const = default;
};

/// PLL gains for a second-order closed loop with natural frequency `wn` and damping `zeta`.
PllState make_pll(double omega0, double wn = 150.0, double zeta = 0.707);

/// One SRF-PLL update. Holds the state unchanged while |v_bus| < freeze_below.
PllState pll_step(PllState pll, Complex v_bus, double dt);

struct GflConverter {
    std::string id;
    std::string bus;
    GflRole role = GflRole::WindFarm;
    std::string link_branch;  // HVDC links: branch removed when the link trips
    double s_rated_va = 1200e6;

    double p_ref = 0.0;  // dispatch, export negative
    double q_ref = 0.0;
    double p_frt = 0.0;
    double q_frt = 0.0;
    double k_gfl = 0.0;  // pu power per rad/s of over-frequency

    PllState pll;
    Complex power_loop{};  // PI integrator states (d + jq), PLL-frame current
    double outer_kp = 0.0;
    double outer_loop_bandwidth = 20.0;  // rad/s, doubles as the loop integral gain
    double v_floor = 0.1;                // pu, divisor floor for the power-to-current map

    FrtState frt_state = FrtState::Normal;
    double v_enter = 0.85;
    double v_exit = 0.90;
    double recovery_ramp = 5.0;  // pu/s
    double p_ramp = 0.0;         // ramped setpoints while recovering
    double q_ramp = 0.0;

    double i_limit = 1.2;
    bool limited = false;

    double omega0() const { return pll.omega0; }

    bool operator==(const GflConverter&) const = default;
};

struct PowerSetpoint {
    double p = 0.0;
    double q = 0.0;
};

/// FRT state machine: Normal→FaultRide on v < v_enter, FaultRide→Recovery on v ≥ v_exit,
/// Recovery→Normal once the ramped setpoints reach dispatch.
GflConverter frt_transition(GflConverter conv, double v_meas);

/// Moves the recovery ramp towards dispatch at `recovery_ramp` pu/s. No-op outside Recovery.
GflConverter advance_recovery(GflConverter conv, double dt);

/// Droop-corrected setpoint for the present FRT state.
PowerSetpoint effective_setpoint(const GflConverter& conv, double omega_pll);

/// Outer power loop. Advances the PI states and returns the saturated current
/// reference in the common frame.
Complex gfl_outer_loop(GflConverter& conv, Complex v_bus, double omega_pll, double dt);

struct GfmConverter {
    std::string id;
    std::string bus;
    double s_rated_va = 1200e6;

    double p_nom = 1.0;
    double p_limit = 1.2;
    double k_gfm = 0.03;
    double omega0 = 2.0 * std::numbers::pi * 50.0;
    double theta = 0.0;

    double v_mag_ref = 1.0;
    double v_kp = 0.0;
    double v_ki = 20.0;
    double emf = 1.0;  // voltage-loop integrator, internal EMF magnitude
    Complex filter_impedance{0.0075, 0.15};

    double p_filter_tau = 0.005;  // s
    double p_measured = 0.0;      // export negative

    double i_limit = 1.2;
    double release_ratio = 0.95;
    bool limited = false;

    bool operator==(const GfmConverter&) const = default;
};

/// Overload f(P) droop: ω0 inside the deadband, linear up to ω0·(1 + k_gfm) at p_limit.
double gfm_droop(const GfmConverter& conv);

/// Controller update from last step's terminal voltage and injected current.
/// Returns the internal EMF phasor for the voltage-source (Norton) model.
Complex gfm_step(GfmConverter& conv, Complex v_bus, Complex i_injected, double dt);

struct CurrentLimitDecision {
    Complex current;
    bool limited = false;
};

/// Hard current limit with hysteresis: saturate above i_limit, release below
/// release_ratio·i_limit. The saturated command keeps the unsaturated angle.
CurrentLimitDecision apply_current_limit(GfmConverter& conv, Complex i_unsaturated);

}  // namespace frtsim
