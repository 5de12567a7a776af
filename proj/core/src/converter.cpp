#include "frtsim/converter.hpp"

#include <algorithm>
#include <cmath>

namespace frtsim {

std::string_view to_string(FrtState s) {
    switch (s) {
        case FrtState::Normal: return "normal";
        case FrtState::FaultRide: return "fault_ride";
        case FrtState::Recovery: return "recovery";
    }
    return "?";
}

std::string_view to_string(GflRole r) {
    return r == GflRole::WindFarm ? "wind_farm" : "hvdc_link";
}

PllState make_pll(double omega0, double wn, double zeta) {
    PllState pll;
    pll.omega0 = omega0;
    pll.omega = omega0;
    pll.kp = 2.0 * zeta * wn;
    pll.ki = wn * wn;
    return pll;
}

PllState pll_step(PllState pll, Complex v_bus, double dt) {
    const double mag = std::abs(v_bus);
    if (mag < pll.freeze_below) return pll;
    // q-axis component of the bus voltage in the PLL frame, normalized: sin(angle error)
    const Complex v_dq = v_bus * std::polar(1.0, -pll.theta);
    const double err = v_dq.imag() / mag;
    pll.integrator += pll.ki * err * dt;
    pll.omega = pll.omega0 + pll.kp * err + pll.integrator;
    pll.theta = std::remainder(pll.theta + (pll.omega - pll.omega0) * dt, 2.0 * std::numbers::pi);
    return pll;
}

GflConverter frt_transition(GflConverter conv, double v_meas) {
    switch (conv.frt_state) {
        case FrtState::Normal:
            if (v_meas < conv.v_enter) {
                conv.frt_state = FrtState::FaultRide;
                conv.p_ramp = conv.p_frt;
                conv.q_ramp = conv.q_frt;
            }
            break;
        case FrtState::FaultRide:
            if (v_meas >= conv.v_exit) {
                conv.frt_state = FrtState::Recovery;
                conv.p_ramp = conv.p_frt;
                conv.q_ramp = conv.q_frt;
            }
            break;
        case FrtState::Recovery:
            if (v_meas < conv.v_enter) {
                conv.frt_state = FrtState::FaultRide;
                conv.p_ramp = conv.p_frt;
                conv.q_ramp = conv.q_frt;
            } else if (conv.p_ramp == conv.p_ref && conv.q_ramp == conv.q_ref) {
                conv.frt_state = FrtState::Normal;
            }
            break;
    }
    return conv;
}

namespace {

double ramp_towards(double value, double target, double max_step) {
    if (value < target) return std::min(target, value + max_step);
    return std::max(target, value - max_step);
}

}  // namespace

GflConverter advance_recovery(GflConverter conv, double dt) {
    if (conv.frt_state != FrtState::Recovery) return conv;
    const double step = conv.recovery_ramp * dt;
    conv.p_ramp = ramp_towards(conv.p_ramp, conv.p_ref, step);
    conv.q_ramp = ramp_towards(conv.q_ramp, conv.q_ref, step);
    return conv;
}

PowerSetpoint effective_setpoint(const GflConverter& conv, double omega_pll) {
    double base_p = conv.p_ref;
    double base_q = conv.q_ref;
    switch (conv.frt_state) {
        case FrtState::FaultRide: return {conv.p_frt, conv.q_frt};
        case FrtState::Recovery:
            base_p = conv.p_ramp;
            base_q = conv.q_ramp;
            break;
        case FrtState::Normal: break;
    }
    // Curtailment only: never beyond the (ramped) dispatch, never a reversal.
    const double delta_p = conv.k_gfl * (conv.omega0() - omega_pll);
    const double p = std::clamp(base_p + delta_p, std::min(0.0, base_p), std::max(0.0, base_p));
    return {p, base_q};
}

Complex gfl_outer_loop(GflConverter& conv, Complex v_bus, double omega_pll, double dt) {
    const PowerSetpoint sp = effective_setpoint(conv, omega_pll);
    const Complex rot = std::polar(1.0, conv.pll.theta);
    const double v_eff = std::max(std::abs(v_bus), conv.v_floor);

    // dq references with the d axis on the PLL angle: i_d = P/|v|, i_q = -Q/|v|.
    // With constant |v| the integral loop is a first-order power response at
    // outer_loop_bandwidth.
    const Complex target = std::conj(Complex{sp.p, sp.q}) / v_eff;
    const Complex err = target - conv.power_loop;
    conv.power_loop += conv.outer_loop_bandwidth * err * dt;
    Complex i_dq = conv.power_loop + conv.outer_kp * err;

    conv.limited = false;
    if (const double m = std::abs(i_dq); m > conv.i_limit) {
        i_dq *= conv.i_limit / m;
        conv.limited = true;
    }
    if (const double m = std::abs(conv.power_loop); m > conv.i_limit) {
        conv.power_loop *= conv.i_limit / m;
    }
    return i_dq * rot;
}

double gfm_droop(const GfmConverter& conv) {
    const double band = conv.p_limit - conv.p_nom;
    const double overload = std::max(0.0, std::min(std::abs(conv.p_measured), conv.p_limit) - conv.p_nom);
    if (!(band > 0.0)) return conv.omega0;
    return conv.omega0 * (1.0 + conv.k_gfm * overload / band);
}

Complex gfm_step(GfmConverter& conv, Complex v_bus, Complex i_injected, double dt) {
    const double p_inst = (v_bus * std::conj(i_injected)).real();
    if (conv.p_filter_tau > 0.0) {
        conv.p_measured += (1.0 - std::exp(-dt / conv.p_filter_tau)) * (p_inst - conv.p_measured);
    } else {
        conv.p_measured = p_inst;
    }
    const double omega = gfm_droop(conv);
    conv.theta = std::remainder(conv.theta + (omega - conv.omega0) * dt, 2.0 * std::numbers::pi);

    const double err = conv.v_mag_ref - std::abs(v_bus);
    if (!conv.limited) conv.emf += conv.v_ki * err * dt;  // frozen while saturated
    const double e_mag = std::max(0.0, conv.emf + conv.v_kp * err);
    return std::polar(e_mag, conv.theta);
}

CurrentLimitDecision apply_current_limit(GfmConverter& conv, Complex i_unsaturated) {
    const double m = std::abs(i_unsaturated);
    if (!conv.limited && m > conv.i_limit) {
        conv.limited = true;
    } else if (conv.limited && m < conv.release_ratio * conv.i_limit) {
        conv.limited = false;
    }
    if (!conv.limited) return {i_unsaturated, false};
    const Complex dir = m > 0.0 ? i_unsaturated / m : Complex{1.0, 0.0};
    return {conv.i_limit * dir, true};
}

}  // namespace frtsim
