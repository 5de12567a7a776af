#include "frtsim/per_unit.hpp"

#include <cmath>

#include "frtsim/error.hpp"

namespace frtsim {

void BaseQuantities::validate() const {
    if (!(s_base_va > 0.0)) throw ArgumentError("s_base must be positive");
    if (!(f0_hz > 0.0)) throw ArgumentError("f0 must be positive");
    for (const auto& [level, v] : v_base_v) {
        if (!(v > 0.0)) throw ArgumentError("v_base of level '" + level + "' must be positive");
    }
}

double BaseQuantities::v_base(const std::string& level) const {
    auto it = v_base_v.find(level);
    if (it == v_base_v.end()) throw StructuralError("unknown voltage level '" + level + "'");
    return it->second;
}

double BaseQuantities::z_base(const std::string& level) const {
    const double v = v_base(level);
    return v * v / s_base_va;
}

double BaseQuantities::i_base(const std::string& level) const {
    return s_base_va / (std::sqrt(3.0) * v_base(level));
}

double BaseQuantities::voltage_to_pu(double volts, const std::string& level) const {
    return volts / v_base(level);
}

double BaseQuantities::voltage_from_pu(double pu, const std::string& level) const {
    return pu * v_base(level);
}

Complex BaseQuantities::impedance_to_pu(Complex ohms, const std::string& level) const {
    return ohms / z_base(level);
}

Complex BaseQuantities::impedance_from_pu(Complex pu, const std::string& level) const {
    return pu * z_base(level);
}

double BaseQuantities::current_to_pu(double amps, const std::string& level) const {
    return amps / i_base(level);
}

double BaseQuantities::current_from_pu(double pu, const std::string& level) const {
    return pu * i_base(level);
}

}  // namespace frtsim
