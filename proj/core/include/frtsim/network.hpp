#pragma once

// Positive-sequence algebraic network: buses, branches, nodal admittance
// assembly and the dense direct solve used at every simulation step.

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frtsim/per_unit.hpp"

namespace frtsim {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

struct Bus {
    std::string id;
    std::string voltage_level;
    Complex shunt{};                     // pu, passive
    std::optional<Complex> fault_shunt;  // pu, present only while a fault is applied

    bool operator==(const Bus&) const = default;
};

struct Branch {
    std::string id;
    std::string from_bus;
    std::string to_bus;
    Complex series_impedance{};  // pu
    double shunt_susceptance = 0.0;  // total line charging, pu (split half per end)
    double tap_ratio = 1.0;          // off-nominal ratio on the from side
    bool in_service = true;

    bool operator==(const Branch&) const = default;
};

class Network {
  public:
    Network() = default;
    /// Validates ids, passivity and branch parameters. Throws StructuralError / ArgumentError.
    Network(std::vector<Bus> buses, std::vector<Branch> branches);

    const std::vector<Bus>& buses() const { return buses_; }
    const std::vector<Branch>& branches() const { return branches_; }
    std::size_t size() const { return buses_.size(); }

    std::size_t bus_index(std::string_view id) const;
    std::optional<std::size_t> find_bus(std::string_view id) const;
    std::size_t branch_index(std::string_view id) const;
    std::optional<std::size_t> find_branch(std::string_view id) const;

    void apply_fault(std::string_view bus, Complex y_fault);
    void clear_fault(std::string_view bus);
    bool has_fault(std::string_view bus) const;
    void set_branch_in_service(std::string_view branch, bool in_service);

    bool dirty() const { return dirty_; }

    /// Cached nodal admittance; rebuilt on first access after any mutation.
    const ComplexMatrix& admittance();

    /// Resistive loss of all in-service branches and passive/fault shunts at voltages `v`.
    double resistive_loss(std::span<const Complex> v) const;

    /// Equality over topology and parameters; the cache is ignored.
    bool operator==(const Network& other) const {
        return buses_ == other.buses_ && branches_ == other.branches_;
    }

  private:
    std::vector<Bus> buses_;
    std::vector<Branch> branches_;
    ComplexMatrix y_cache_;
    bool dirty_ = true;

    Bus& bus_ref(std::string_view id);
};

/// Standard nodal stamps: series, charging, tap, bus shunt and fault shunt.
/// Pure with respect to the network; does not touch the cache.
ComplexMatrix build_admittance(const Network& network);

/// Groups of bus ids that have no path to ground. `extra_grounded` marks buses
/// grounded by something outside the network (a converter's Norton admittance).
std::vector<std::vector<std::string>> find_floating_islands(
    const Network& network, std::span<const std::size_t> extra_grounded = {});

/// Pivoted dense LU with a singularity check and a residual bound on every solve.
class LinearSolver {
  public:
    static constexpr double kResidualBound = 1e-10;

    LinearSolver() = default;
    /// Throws NumericalError if the matrix is numerically singular.
    explicit LinearSolver(ComplexMatrix y);

    /// Solves Y·V = I. Throws NumericalError if ‖Y·V − I‖∞ exceeds the bound.
    ComplexVector solve(const ComplexVector& injections) const;

    const ComplexMatrix& matrix() const { return y_; }
    double last_residual() const { return last_residual_; }

  private:
    ComplexMatrix y_;
    Eigen::PartialPivLU<ComplexMatrix> lu_;
    mutable double last_residual_ = 0.0;
};

/// One-shot V = Y⁻¹·I against the network's cached admittance. Names any floating
/// island when the matrix is singular.
std::vector<Complex> solve_network(Network& network, std::span<const Complex> injections);

}  // namespace frtsim
