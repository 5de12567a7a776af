#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "frtsim/coordination.hpp"
#include "frtsim/error.hpp"

using namespace frtsim;

namespace {

DispatchPlan island_plan() {
    DispatchPlan p;
    p.p_exp_mw = 1200.0;
    p.n_wf = 2;
    p.p_gfm_nom_mw = 1200.0;
    p.p_gfm_0_mw = 1200.0;
    p.k_gfm = 0.03;
    p.f0_hz = 50.0;
    p.wf_dispatch_mw = {1200.0, 1200.0};
    return p;
}

// Independent balance: WF output minus (remaining export + GFM export) at frequency f,
// written out from the droop definitions rather than shared with the library.
double scan_balance(const DispatchPlan& p, double k, double tripped, double f) {
    const double df = f - p.f0_hz;
    double wf = 0.0;
    for (double w : p.wf_dispatch_mw) wf += std::max(0.0, w - k * df);
    const double span = p.k_gfm * p.f0_hz;
    const double gfm = p.p_gfm_nom_mw + std::clamp(df / span, 0.0, 1.0) * (p.overload_factor - 1.0) * p.p_gfm_nom_mw;
    return wf - (p.p_exp_mw - tripped) - gfm;
}

// First sign change on a 1e-4 Hz grid, linearly interpolated; NaN when none exists.
double scan_root(const DispatchPlan& p, double k, double tripped) {
    const double step = 1e-4;
    const double top = p.f0_hz * (1.0 + p.k_gfm);
    double prev = scan_balance(p, k, tripped, p.f0_hz);
    for (double f = p.f0_hz + step; f <= top + 1e-12; f += step) {
        const double g = scan_balance(p, k, tripped, f);
        if (prev > 0.0 && g <= 0.0) return f - step + step * prev / (prev - g);
        prev = g;
    }
    return std::nan("");
}

DispatchPlan random_plan(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> n(1, 6);
    DispatchPlan p;
    p.n_wf = n(rng);
    p.p_gfm_nom_mw = 100.0 + 1900.0 * u(rng);
    p.k_gfm = 0.005 + 0.05 * u(rng);
    p.f0_hz = u(rng) < 0.5 ? 50.0 : 60.0;
    p.overload_factor = 1.05 + 0.4 * u(rng);
    const double per_wf = 50.0 + 1500.0 * u(rng);
    p.wf_dispatch_mw.assign(static_cast<std::size_t>(p.n_wf), per_wf);
    const double total = per_wf * p.n_wf;
    p.p_gfm_0_mw = std::min(p.p_gfm_nom_mw, total) * u(rng);
    p.p_exp_mw = total - p.p_gfm_0_mw;
    return p;
}

}  // namespace

TEST_SUITE("coordination") {

TEST_CASE("droop gain for the island dispatch") {
    const DispatchPlan p = island_plan();
    CHECK(p.surplus_mw() == doctest::Approx(960.0));
    CHECK(max_frequency_deviation(p) == doctest::Approx(1.5));
    CHECK(compute_gfl_droop_gain(p) == doctest::Approx(320.0).epsilon(1e-12));
    // literal denominator N * K_GFM * 1.2 * P_GFM^N, read as Hz per unit at 50 Hz
    CHECK(compute_gfl_droop_gain(p, GainFormula::Literal) == doctest::Approx(960.0 / (2 * 0.03 * 1.2 * 50.0)));
    CHECK(compute_gfl_droop_gain(p, GainFormula::Literal) == doctest::Approx(266.6666667));
}

TEST_CASE("no curtailment while the GFM headroom covers the loss") {
    DispatchPlan p = island_plan();
    p.p_exp_mw = 240.0;
    p.wf_dispatch_mw = {720.0, 720.0};
    CHECK(p.surplus_mw() == doctest::Approx(0.0));
    CHECK(compute_gfl_droop_gain(p) == 0.0);

    DispatchPlan q = island_plan();
    q.p_gfm_0_mw = 0.0;
    q.wf_dispatch_mw = {600.0, 600.0};
    CHECK(compute_gfl_droop_gain(q) == 0.0);
}

TEST_CASE("plan validation") {
    DispatchPlan p = island_plan();
    p.p_exp_mw = -1.0;
    CHECK_THROWS_AS(compute_gfl_droop_gain(p), ArgumentError);
    p = island_plan();
    p.n_wf = 0;
    p.wf_dispatch_mw.clear();
    CHECK_THROWS_AS(compute_gfl_droop_gain(p), ArgumentError);
    p = island_plan();
    p.wf_dispatch_mw = {1200.0, 1000.0};
    CHECK_THROWS_AS(p.validate(), ArgumentError);
    p = island_plan();
    p.p_gfm_0_mw = 1300.0;
    CHECK_THROWS_AS(p.validate(), ArgumentError);
    CHECK_THROWS_AS(predict_post_fault_equilibrium(island_plan(), 320.0, 1500.0), ArgumentError);
    CHECK_THROWS_AS(predict_post_fault_equilibrium(island_plan(), -1.0, 0.0), ArgumentError);
}

TEST_CASE("full trip of the island export") {
    const auto e = predict_post_fault_equilibrium(island_plan(), 320.0, 1200.0);
    CHECK(e.feasible);
    CHECK(e.frequency_hz == doctest::Approx(51.5).epsilon(1e-12));
    CHECK(e.gfm_export_mw == doctest::Approx(1440.0).epsilon(1e-12));
    REQUIRE(e.wf_outputs_mw.size() == 2);
    CHECK(e.wf_outputs_mw[0] == doctest::Approx(720.0).epsilon(1e-12));
    CHECK(e.wf_outputs_mw[1] == doctest::Approx(720.0).epsilon(1e-12));
    CHECK(e.delta_p_mw[0] == doctest::Approx(480.0).epsilon(1e-12));
}

TEST_CASE("no trip leaves the operating point alone") {
    const auto e = predict_post_fault_equilibrium(island_plan(), 320.0, 0.0);
    CHECK(e.feasible);
    CHECK(e.frequency_hz == 50.0);
    CHECK(e.gfm_export_mw == doctest::Approx(1200.0));
    CHECK(e.wf_outputs_mw == std::vector<double>{1200.0, 1200.0});
}

TEST_CASE("partial trip agrees with a dense frequency scan") {
    const DispatchPlan p = island_plan();
    const double f_scan = scan_root(p, 320.0, 600.0);
    const auto e = predict_post_fault_equilibrium(p, 320.0, 600.0);
    CHECK(e.feasible);
    CHECK(std::abs(e.frequency_hz - f_scan) < 1e-4);
    // frozen from the scan: 2400 - 640 x = 600 + 1200 + 160 x  ->  x = 0.75 Hz
    CHECK(e.frequency_hz == doctest::Approx(50.75).epsilon(1e-9));
    CHECK(e.gfm_export_mw == doctest::Approx(1320.0).epsilon(1e-9));
    CHECK(e.wf_outputs_mw[0] == doctest::Approx(960.0).epsilon(1e-9));

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        const double tripped = 1200.0 * u(rng);
        const double k = 100.0 + 400.0 * u(rng);
        const auto pred = predict_post_fault_equilibrium(p, k, tripped);
        const double ref = scan_root(p, k, tripped);
        if (std::isnan(ref)) {
            // no sign change: either the deadband absorbs the trip or nothing balances
            if (scan_balance(p, k, tripped, 50.0) <= 0.0) {
                CHECK(pred.feasible);
                CHECK(pred.frequency_hz == 50.0);
            } else {
                CHECK_FALSE(pred.feasible);
            }
        } else {
            CHECK(std::abs(pred.frequency_hz - ref) < 1e-4);
        }
    }
}

TEST_CASE("infeasible when curtailment cannot absorb the surplus") {
    DispatchPlan p;
    p.p_gfm_nom_mw = 1000.0;
    p.p_gfm_0_mw = 1000.0;
    p.n_wf = 2;
    p.wf_dispatch_mw = {1900.0, 100.0};
    p.p_exp_mw = 1000.0;
    const double k = compute_gfl_droop_gain(p);
    CHECK(k == doctest::Approx(800.0 / 3.0));
    for (double f = 50.0; f <= 51.5; f += 1e-3) CHECK(scan_balance(p, k, 1000.0, f) > 0.0);
    const auto e = predict_post_fault_equilibrium(p, k, 1000.0);
    CHECK_FALSE(e.feasible);
    CHECK(e.gfm_export_mw <= p.gfm_limit_mw());

    CHECK_FALSE(predict_post_fault_equilibrium(island_plan(), 0.0, 1200.0).feasible);
}

TEST_CASE("contingency enumeration") {
    DispatchPlan p = island_plan();
    p.links = {{"hvdc2", 600.0}, {"hvdc3", 600.0}};
    const auto r = check_n1_survivability(p, 320.0);
    REQUIRE(r.size() == 3);
    CHECK(r[0].label == "loss of hvdc2");
    CHECK(r[1].label == "loss of hvdc3");
    CHECK(r[2].label == "loss of all GFL links");
    CHECK(r[0].prediction.frequency_hz == doctest::Approx(50.75));
    CHECK(r[2].prediction.feasible);
    CHECK(r[2].prediction.gfm_export_mw == doctest::Approx(1440.0));

    p.links = {{"hvdc2", 1200.0}};
    const auto single = check_n1_survivability(p, 320.0);
    REQUIRE(single.size() == 1);
    CHECK(single[0].label == "loss of hvdc2 (all GFL links)");

    DispatchPlan idle = island_plan();
    idle.p_exp_mw = 0.0;
    idle.wf_dispatch_mw = {600.0, 600.0};
    for (const auto& c : check_n1_survivability(idle, 0.0)) {
        CHECK(c.prediction.feasible);
        CHECK(c.prediction.frequency_hz == 50.0);
    }
}

TEST_CASE("all-links identity over random plans") {
    std::mt19937 rng(2024);
    int with_surplus = 0;
    for (int i = 0; i < 1000; ++i) {
        const DispatchPlan p = random_plan(rng);
        const double k = compute_gfl_droop_gain(p);
        const auto e = predict_post_fault_equilibrium(p, k, p.p_exp_mw);
        REQUIRE(e.feasible);
        const double sum_dp = std::accumulate(e.delta_p_mw.begin(), e.delta_p_mw.end(), 0.0);
        const double surplus = p.p_exp_mw - (p.overload_factor * p.p_gfm_nom_mw - p.p_gfm_0_mw);
        CHECK(e.gfm_export_mw <= p.gfm_limit_mw() * (1.0 + 1e-12));
        if (surplus > 0.0) {
            ++with_surplus;
            CHECK(std::abs(sum_dp - surplus) < 1e-6);
            CHECK(e.gfm_export_mw == doctest::Approx(p.gfm_limit_mw()).epsilon(1e-12));
        } else {
            CHECK(sum_dp == doctest::Approx(0.0));
        }
    }
    CHECK(with_surplus > 300);
}

TEST_CASE("scale invariance and monotonicity") {
    const DispatchPlan p = island_plan();
    for (double c : {1e-3, 0.37, 2.0, 1e3}) {
        DispatchPlan q = p;
        q.p_exp_mw *= c;
        q.p_gfm_nom_mw *= c;
        q.p_gfm_0_mw *= c;
        for (auto& w : q.wf_dispatch_mw) w *= c;
        for (double tripped : {300.0, 900.0, 1200.0}) {
            const auto a = predict_post_fault_equilibrium(p, 320.0, tripped);
            const auto b = predict_post_fault_equilibrium(q, 320.0 * c, tripped * c);
            CHECK(b.frequency_hz == doctest::Approx(a.frequency_hz).epsilon(1e-9));
            CHECK(b.gfm_export_mw == doctest::Approx(a.gfm_export_mw * c).epsilon(1e-9));
            CHECK(b.wf_outputs_mw[1] == doctest::Approx(a.wf_outputs_mw[1] * c).epsilon(1e-9));
        }
    }
    double last = 0.0;
    for (int i = 0; i <= 240; ++i) {
        const double f = predict_post_fault_equilibrium(p, 320.0, 5.0 * i).frequency_hz;
        CHECK(f >= last - 1e-9);
        last = f;
    }
}

}
