// bench_core.cpp — microbenchmarks for the hot paths: model construction,
// dipole quadrature, the two integration frames of a shipped scenario, and
// spectral analysis of a synthetic trajectory.

#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <vector>

#include "helimix/drive_mixing.hpp"
#include "helimix/lindblad.hpp"
#include "helimix/observables.hpp"
#include "helimix/scenario.hpp"
#include "helimix/surface_state.hpp"

namespace {

using namespace helimix;

void BuildSurfaceModel(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_surface_model());
    }
}
BENCHMARK(BuildSurfaceModel);

void DipoleQuadrature(benchmark::State& state) {
    const SurfaceStateModel model = build_surface_model();
    for (auto _ : state) {
        benchmark::DoNotOptimize(dipole_matrix_element(1, 2, model));
    }
}
BENCHMARK(DipoleQuadrature);

const ResolvedScenario& shipped_scenario() {
    static const ResolvedScenario rs = resolve(builtin_scenario("rwa-vs-exact"));
    return rs;
}

void IntegrateStarkFrame(benchmark::State& state) {
    const ResolvedScenario& rs = shipped_scenario();
    const FrameHamiltonian h = stark_frame_hamiltonian(rs.mixing);
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate(rs.config.initial_state, h,
                                           rs.config.rates, rs.t_end, rs.grid));
    }
}
BENCHMARK(IntegrateStarkFrame);

void IntegrateSidebandFrame(benchmark::State& state) {
    const ResolvedScenario& rs = shipped_scenario();
    const FrameHamiltonian h = rwa_hamiltonian(rs.mixing);
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate(rs.config.initial_state, h,
                                           rs.config.rates, rs.t_end, rs.grid));
    }
}
BENCHMARK(IntegrateSidebandFrame);

Trajectory synthetic_trajectory(std::size_t n) {
    Trajectory traj;
    traj.frame = Frame::Rwa;
    traj.max_drive_frequency = 2.5e7;
    const double dt = 1e-9;
    traj.times.resize(n);
    traj.states.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = dt * static_cast<double>(i);
        DensityMatrix s;
        s.rho22 = 0.3 + 0.1 * std::cos(2.0 * M_PI * 16.0 *
                                       static_cast<double>(i) /
                                       static_cast<double>(n));
        s.rho11 = 1.0 - s.rho22;
        s.rho12 = {0.05 * std::sin(2.5e7 * t), -0.02};
        traj.times[i] = t;
        traj.states[i] = s;
    }
    return traj;
}

void SpectrumAnalysis(benchmark::State& state) {
    const ResolvedScenario& rs = shipped_scenario();
    const Trajectory traj = synthetic_trajectory(4096);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            detrended_spectrum(traj, SpectrumWindow::Hann, rs.mixing));
    }
}
BENCHMARK(SpectrumAnalysis);

}  // namespace

BENCHMARK_MAIN();
