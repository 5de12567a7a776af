#pragma once

#include <complex>
#include <map>
#include <numbers>
#include <string>

namespace frtsim {

using Complex = std::complex<double>;

/// System-wide per-unit bases. Voltages are line-to-line RMS, power is three-phase.
struct BaseQuantities {
    double s_base_va = 1200e6;
    std::map<std::string, double> v_base_v;  // keyed by voltage level name
    double f0_hz = 50.0;

    void validate() const;

    double omega0() const { return 2.0 * std::numbers::pi * f0_hz; }
    double v_base(const std::string& level) const;
    double z_base(const std::string& level) const;
    double i_base(const std::string& level) const;

    double power_to_pu(double watts) const { return watts / s_base_va; }
    double power_from_pu(double pu) const { return pu * s_base_va; }
    double voltage_to_pu(double volts, const std::string& level) const;
    double voltage_from_pu(double pu, const std::string& level) const;
    Complex impedance_to_pu(Complex ohms, const std::string& level) const;
    Complex impedance_from_pu(Complex pu, const std::string& level) const;
    double current_to_pu(double amps, const std::string& level) const;
    double current_from_pu(double pu, const std::string& level) const;

    bool operator==(const BaseQuantities&) const = default;
};

/// Rescales a quantity expressed on a device rating to the system base.
inline double device_to_system_scale(double s_rated_va, const BaseQuantities& base) {
    return s_rated_va / base.s_base_va;
}

}  // namespace frtsim
