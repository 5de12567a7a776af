#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "frtsim/coordination.hpp"
#include "frtsim/scenario.hpp"
#include "frtsim/simulation.hpp"

using namespace frtsim;

namespace {

std::filesystem::path fixture_path(const char* name) {
    return std::filesystem::path(FRTSIM_SCENARIO_DIR) / (std::string(name) + ".yaml");
}

void BM_NetworkSolve(benchmark::State& state) {
    ScenarioFile s = load_scenario(fixture_path("fig6_dc_fault"));
    ComplexMatrix y = s.input.network.admittance();
    y(1, 1) += 1.0 / Complex{0.0075, 0.15};
    const LinearSolver solver(y);
    ComplexVector inj = ComplexVector::Constant(y.rows(), Complex{0.5, -0.1});
    for (auto _ : state) benchmark::DoNotOptimize(solver.solve(inj));
}
BENCHMARK(BM_NetworkSolve);

void BM_Factorize(benchmark::State& state) {
    ScenarioFile s = load_scenario(fixture_path("fig6_dc_fault"));
    const ComplexMatrix y = s.input.network.admittance();
    for (auto _ : state) benchmark::DoNotOptimize(LinearSolver(y));
}
BENCHMARK(BM_Factorize);

void BM_Step(benchmark::State& state) {
    ScenarioFile s = load_scenario(fixture_path("fig6_dc_fault"));
    s.input.config.decimate = 1000000;
    SimulationState sim = initialize_steady_state(s.input);
    for (auto _ : state) step(sim);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Step);

void BM_DcFaultFixture(benchmark::State& state) {
    const ScenarioFile s = load_scenario(fixture_path("fig6_dc_fault"));
    for (auto _ : state) benchmark::DoNotOptimize(run_scenario(s.input));
}
BENCHMARK(BM_DcFaultFixture)->Unit(benchmark::kMillisecond);

void BM_PredictEquilibrium(benchmark::State& state) {
    DispatchPlan p;
    p.p_exp_mw = 1200.0;
    p.n_wf = 2;
    p.p_gfm_nom_mw = 1200.0;
    p.p_gfm_0_mw = 1200.0;
    p.wf_dispatch_mw = {1200.0, 1200.0};
    double tripped = 0.0;
    for (auto _ : state) {
        tripped = tripped + 7.0 > 1200.0 ? 0.0 : tripped + 7.0;
        benchmark::DoNotOptimize(predict_post_fault_equilibrium(p, 320.0, tripped));
    }
}
BENCHMARK(BM_PredictEquilibrium);

void BM_ParseScenario(benchmark::State& state) {
    std::ifstream in(fixture_path("fig6_dc_fault"));
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    for (auto _ : state) benchmark::DoNotOptimize(parse_scenario(text));
}
BENCHMARK(BM_ParseScenario);

}  // namespace

BENCHMARK_MAIN();
