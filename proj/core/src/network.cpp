#include "frtsim/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "frtsim/error.hpp"

namespace frtsim {

Network::Network(std::vector<Bus> buses, std::vector<Branch> branches)
    : buses_(std::move(buses)), branches_(std::move(branches)) {
    if (buses_.empty()) throw StructuralError("network needs at least one bus");
    for (std::size_t i = 0; i < buses_.size(); ++i) {
        const auto& b = buses_[i];
        if (b.id.empty()) throw StructuralError("bus with empty id");
        for (std::size_t j = 0; j < i; ++j) {
            if (buses_[j].id == b.id) throw StructuralError("duplicate bus id '" + b.id + "'");
        }
        if (b.shunt.real() < 0.0) {
            throw ArgumentError("bus '" + b.id + "' has an active shunt (negative conductance)");
        }
    }
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        const auto& br = branches_[i];
        if (!find_bus(br.from_bus) || !find_bus(br.to_bus)) {
            throw StructuralError("branch '" + br.id + "' references a missing bus");
        }
        if (br.from_bus == br.to_bus) throw StructuralError("branch '" + br.id + "' is a self-loop");
        if (!(std::abs(br.series_impedance) > 0.0)) {
            throw ArgumentError("branch '" + br.id + "' has zero series impedance");
        }
        if (!(br.tap_ratio > 0.0)) throw ArgumentError("branch '" + br.id + "' tap ratio must be > 0");
        for (std::size_t j = 0; j < i; ++j) {
            if (!br.id.empty() && branches_[j].id == br.id) {
                throw StructuralError("duplicate branch id '" + br.id + "'");
            }
        }
    }
}

std::optional<std::size_t> Network::find_bus(std::string_view id) const {
    for (std::size_t i = 0; i < buses_.size(); ++i) {
        if (buses_[i].id == id) return i;
    }
    return std::nullopt;
}

std::size_t Network::bus_index(std::string_view id) const {
    if (auto i = find_bus(id)) return *i;
    throw StructuralError("unknown bus '" + std::string(id) + "'");
}

std::optional<std::size_t> Network::find_branch(std::string_view id) const {
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        if (branches_[i].id == id) return i;
    }
    return std::nullopt;
}

std::size_t Network::branch_index(std::string_view id) const {
    if (auto i = find_branch(id)) return *i;
    throw StructuralError("unknown branch '" + std::string(id) + "'");
}

Bus& Network::bus_ref(std::string_view id) { return buses_[bus_index(id)]; }

void Network::apply_fault(std::string_view bus, Complex y_fault) {
    Bus& b = bus_ref(bus);
    if (b.fault_shunt) throw StateError("fault already applied at bus '" + b.id + "'");
    if (y_fault.real() < 0.0) throw ArgumentError("fault admittance must be passive");
    b.fault_shunt = y_fault;
    dirty_ = true;
}

void Network::clear_fault(std::string_view bus) {
    Bus& b = bus_ref(bus);
    if (!b.fault_shunt) throw StateError("no fault present at bus '" + b.id + "'");
    b.fault_shunt.reset();
    dirty_ = true;
}

bool Network::has_fault(std::string_view bus) const {
    return buses_[bus_index(bus)].fault_shunt.has_value();
}

void Network::set_branch_in_service(std::string_view branch, bool in_service) {
    Branch& br = branches_[branch_index(branch)];
    if (br.in_service != in_service) {
        br.in_service = in_service;
        dirty_ = true;
    }
}

const ComplexMatrix& Network::admittance() {
    if (dirty_ || y_cache_.rows() != static_cast<Eigen::Index>(buses_.size())) {
        y_cache_ = build_admittance(*this);
        dirty_ = false;
    }
    return y_cache_;
}

double Network::resistive_loss(std::span<const Complex> v) const {
    double loss = 0.0;
    for (std::size_t i = 0; i < buses_.size(); ++i) {
        Complex y = buses_[i].shunt + buses_[i].fault_shunt.value_or(Complex{});
        loss += y.real() * std::norm(v[i]);
    }
    for (const auto& br : branches_) {
        if (!br.in_service) continue;
        const auto f = bus_index(br.from_bus);
        const auto t = bus_index(br.to_bus);
        const Complex i_series = (v[f] / br.tap_ratio - v[t]) / br.series_impedance;
        loss += br.series_impedance.real() * std::norm(i_series);
    }
    return loss;
}

ComplexMatrix build_admittance(const Network& network) {
    const auto n = static_cast<Eigen::Index>(network.size());
    ComplexMatrix y = ComplexMatrix::Zero(n, n);
    const auto& buses = network.buses();
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& b = buses[static_cast<std::size_t>(i)];
        y(i, i) += b.shunt;
        if (b.fault_shunt) y(i, i) += *b.fault_shunt;
    }
    for (const auto& br : network.branches()) {
        if (!br.in_service) continue;
        const auto f = static_cast<Eigen::Index>(network.bus_index(br.from_bus));
        const auto t = static_cast<Eigen::Index>(network.bus_index(br.to_bus));
        const Complex ys = 1.0 / br.series_impedance;
        const Complex ysh{0.0, 0.5 * br.shunt_susceptance};
        const double a = br.tap_ratio;
        y(f, f) += ys / (a * a) + ysh;
        y(t, t) += ys + ysh;
        y(f, t) -= ys / a;
        y(t, f) -= ys / a;
    }
    return y;
}

std::vector<std::vector<std::string>> find_floating_islands(
    const Network& network, std::span<const std::size_t> extra_grounded) {
    const std::size_t n = network.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<bool> grounded(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& b = network.buses()[i];
        if (b.shunt != Complex{} || (b.fault_shunt && *b.fault_shunt != Complex{})) grounded[i] = true;
    }
    for (auto g : extra_grounded) {
        if (g < n) grounded[g] = true;
    }
    for (const auto& br : network.branches()) {
        if (!br.in_service) continue;
        const auto f = network.bus_index(br.from_bus);
        const auto t = network.bus_index(br.to_bus);
        if (br.shunt_susceptance != 0.0) grounded[f] = grounded[t] = true;
        parent[find(f)] = find(t);
    }
    std::vector<bool> root_grounded(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (grounded[i]) root_grounded[find(i)] = true;
    }
    std::vector<std::vector<std::string>> islands;
    std::vector<long> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = find(i);
        if (root_grounded[r]) continue;
        if (slot[r] < 0) {
            slot[r] = static_cast<long>(islands.size());
            islands.emplace_back();
        }
        islands[static_cast<std::size_t>(slot[r])].push_back(network.buses()[i].id);
    }
    return islands;
}

LinearSolver::LinearSolver(ComplexMatrix y) : y_(std::move(y)) {
    if (y_.rows() == 0 || y_.rows() != y_.cols()) throw NumericalError("admittance matrix is empty or not square");
    lu_.compute(y_);
    const double rcond = lu_.rcond();
    if (!(rcond > 1e-14)) {
        std::ostringstream os;
        os << "admittance matrix is numerically singular (rcond=" << rcond << ")";
        throw NumericalError(os.str());
    }
}

ComplexVector LinearSolver::solve(const ComplexVector& injections) const {
    ComplexVector v = lu_.solve(injections);
    const double residual = (y_ * v - injections).cwiseAbs().maxCoeff();
    last_residual_ = residual;
    if (!(residual < kResidualBound) || !v.allFinite()) {
        std::ostringstream os;
        os << "network solve residual " << residual << " exceeds bound " << kResidualBound;
        throw NumericalError(os.str());
    }
    return v;
}

std::vector<Complex> solve_network(Network& network, std::span<const Complex> injections) {
    if (injections.size() != network.size()) {
        throw ArgumentError("injection vector length does not match bus count");
    }
    if (auto islands = find_floating_islands(network); !islands.empty()) {
        std::string names;
        for (const auto& id : islands.front()) names += (names.empty() ? "" : ", ") + id;
        throw NumericalError("floating island without a grounding path: {" + names + "}");
    }
    LinearSolver solver(network.admittance());
    ComplexVector rhs(static_cast<Eigen::Index>(injections.size()));
    for (std::size_t i = 0; i < injections.size(); ++i) rhs(static_cast<Eigen::Index>(i)) = injections[i];
    const ComplexVector v = solver.solve(rhs);
    return {v.data(), v.data() + v.size()};
}

}  // namespace frtsim
