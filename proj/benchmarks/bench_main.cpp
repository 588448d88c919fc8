#include <benchmark/benchmark.h>

#include <cmath>

#include "kdvd/certificate.hpp"
#include "kdvd/harness.hpp"
#include "kdvd/time_stepper.hpp"

using namespace kdvd;

namespace {

DelaySpec unit_delay() {
    DelaySpec d;
    d.tau0 = d.M = d.base = 1.0;
    d.history.resize(1001);
    for (size_t j = 0; j < d.history.size(); ++j) d.history[j] = std::pow(std::sin(M_PI * j / 1000.0), 4);
    return d;
}

void BM_Assemble(benchmark::State& st) {
    const Grid g = make_grid(1.0, static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(SpatialOperators(SystemParams{}, g));
}
BENCHMARK(BM_Assemble)->Arg(100)->Arg(400)->Arg(1600);

void BM_LinearStep(benchmark::State& st) {
    const SpatialOperators ops(SystemParams{}, make_grid(1.0, static_cast<int>(st.range(0))));
    const auto d = unit_delay();
    StepConfig cfg;
    const Stepper stepper(ops, cfg, d);
    SimState s = initial_state(ops, d, [](double) { return 0.0; }, [](double) { return 0.0; }, cfg.dt);
    for (auto _ : st) {
        stepper.step(s);
        if (s.t > 0.9) {
            st.PauseTiming();
            s = initial_state(ops, d, [](double) { return 0.0; }, [](double) { return 0.0; }, cfg.dt);
            st.ResumeTiming();
        }
    }
    st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_LinearStep)->RangeMultiplier(2)->Range(100, 1600)->Complexity(benchmark::oN);

void BM_NonlinearStep(benchmark::State& st) {
    const SpatialOperators ops(SystemParams{}, make_grid(1.0, static_cast<int>(st.range(0))));
    const auto d = unit_delay();
    StepConfig cfg;
    cfg.nonlinear = true;
    const Stepper stepper(ops, cfg, d);
    const auto eta = [](double x) { return 1e-2 * 64 * x * x * x * std::pow(1 - x, 3); };
    const auto omega = [](double x) { return 1e-2 * 3125.0 / 108 * x * x * std::pow(1 - x, 3); };
    SimState s = initial_state(ops, d, eta, omega, cfg.dt);
    for (auto _ : st) {
        stepper.step(s);
        if (s.t > 0.9) {
            st.PauseTiming();
            s = initial_state(ops, d, eta, omega, cfg.dt);
            st.ResumeTiming();
        }
    }
}
BENCHMARK(BM_NonlinearStep)->Arg(100)->Arg(400);

void BM_Energy(benchmark::State& st) {
    const SpatialOperators ops(SystemParams{}, make_grid(1.0, 200));
    const auto d = unit_delay();
    const SimState s = initial_state(ops, d, [](double) { return 0.0; }, [](double) { return 0.0; }, 1e-3);
    const int m = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(sample_energy(ops, s, d, 0.01, 0.5, m));
}
BENCHMARK(BM_Energy)->Arg(64)->Arg(1000);

void BM_Certify(benchmark::State& st) {
    const auto d = unit_delay();
    for (auto _ : st) benchmark::DoNotOptimize(certify(SystemParams{}, d));
}
BENCHMARK(BM_Certify);

}  // namespace
BENCHMARK_MAIN();
