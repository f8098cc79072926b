// test_lindblad.cpp — master-equation right-hand side, adaptive integration
// against closed forms, and the steady-state solver.

#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "approx.hpp"
#include "helimix/constants.hpp"
#include "helimix/drive_mixing.hpp"
#include "helimix/errors.hpp"
#include "helimix/lindblad.hpp"
#include "helimix/surface_state.hpp"

using namespace helimix;

namespace {

const SurfaceStateModel& model() {
    static const SurfaceStateModel m = build_surface_model();
    return m;
}

MixingConfig base_config() {
    return build_mixing_from_couplings(model(), 1e8, 1e9, 0.0,
                                       {{0.5, 1e9, 0.0}});
}

// Constant Hamiltonian with an explicit fast-rate hint for the step ceiling.
FrameHamiltonian constant_h(double h11, double h22, std::complex<double> h12,
                            double max_frequency) {
    FrameHamiltonian h;
    h.frame = Frame::Rwa;
    h.at = [h11, h22, h12](double) {
        Hermitian2 m;
        m.h11 = h11;
        m.h22 = h22;
        m.h12 = h12;
        return m;
    };
    h.max_frequency = max_frequency;
    h.time_independent = true;
    h.description = "test: constant";
    return h;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
    g.back() = b;
    return g;
}

// Dense 2x2 oracle for the master equation, written in full matrix algebra
// (independent of the three-component implementation).
using C2 = std::array<std::complex<double>, 4>;  // row-major

C2 mul(const C2& a, const C2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

C2 lin(const C2& a, const C2& b, std::complex<double> ca,
       std::complex<double> cb) {
    C2 out;
    for (int i = 0; i < 4; ++i) out[i] = ca * a[i] + cb * b[i];
    return out;
}

C2 dagger(const C2& a) {
    return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]),
            std::conj(a[3])};
}

// D[L] rho = L rho L^dag - (L^dag L rho + rho L^dag L) / 2
C2 dissipator(const C2& l, const C2& rho) {
    const C2 ld = dagger(l);
    const C2 gain = mul(mul(l, rho), ld);
    const C2 ldl = mul(ld, l);
    const C2 loss = lin(mul(ldl, rho), mul(rho, ldl), 0.5, 0.5);
    return lin(gain, loss, 1.0, -1.0);
}

C2 dense_rhs(const C2& h, const C2& rho, const DecoherenceRates& rates) {
    const std::complex<double> minus_i{0.0, -1.0};
    C2 out = lin(mul(h, rho), mul(rho, h), minus_i, -minus_i);
    const C2 sigma_minus{0.0, 1.0, 0.0, 0.0};  // |1><2|
    const C2 p1{1.0, 0.0, 0.0, 0.0};
    const C2 p2{0.0, 0.0, 0.0, 1.0};
    out = lin(out, dissipator(sigma_minus, rho), 1.0, rates.decay);
    out = lin(out, dissipator(p1, rho), 1.0, rates.dephasing1);
    out = lin(out, dissipator(p2, rho), 1.0, rates.dephasing2);
    return out;
}

}  // namespace

TEST_CASE("density-matrix validation enforces physicality") {
    CHECK_NOTHROW(ground_state().validate());
    CHECK(ground_state().rho11 == 1.0);
    CHECK(ground_state().rho22 == 0.0);

    DensityMatrix bad_trace{0.4, 0.4, {0.0, 0.0}};
    CHECK_THROWS_AS(bad_trace.validate(), std::domain_error);

    DensityMatrix bad_population{-0.2, 1.2, {0.0, 0.0}};
    CHECK_THROWS_AS(bad_population.validate(), std::domain_error);

    DensityMatrix bad_coherence{0.5, 0.5, {0.6, 0.0}};
    CHECK_THROWS_AS(bad_coherence.validate(), std::domain_error);

    DensityMatrix ok{0.5, 0.5, {0.35, 0.35}};
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("decoherence rates validation and transverse rate") {
    const DecoherenceRates rates{1e7, 5e6, 5e6};
    CHECK_NOTHROW(rates.validate());
    CHECK(rates.coherence_decay() == rel(1e7, 1e-15));

    DecoherenceRates bad{-1.0, 0.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
    bad = DecoherenceRates{0.0, -1.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
}

TEST_CASE("right-hand side matches the dense Lindblad form") {
    const FrameHamiltonian h = stark_frame_hamiltonian(base_config());
    const DecoherenceRates rates{1e7, 3e6, 7e6};
    const DensityMatrix rho{0.55, 0.45, {0.12, -0.08}};
    rho.validate();

    const double t = 0.8e-9;
    const DensityMatrixRate r = lindblad_rhs(t, rho, h, rates);

    const Hermitian2 hm = h.at(t);
    const C2 rho_m{rho.rho11, rho.rho12, std::conj(rho.rho12), rho.rho22};
    const C2 d = dense_rhs(hm.as_matrix(), rho_m, rates);

    CHECK(r.rho22_dot == rel(d[3].real(), 1e-12));
    CHECK(r.rho12_dot.real() == rel(d[1].real(), 1e-12));
    CHECK(r.rho12_dot.imag() == rel(d[1].imag(), 1e-12));
    // Trace preservation is exact, not approximate.
    CHECK(r.rho11_dot == -r.rho22_dot);
    CHECK(std::abs(d[0].real() + d[3].real()) < 1e-3);

    // No drive and no decoherence: nothing moves.
    const DensityMatrixRate still =
        lindblad_rhs(0.0, rho, constant_h(0, 0, {0, 0}, 0), DecoherenceRates{});
    CHECK(still.rho22_dot == 0.0);
    CHECK(still.rho12_dot == std::complex<double>(0.0, 0.0));
}

TEST_CASE("driven lossless evolution matches the closed-form oscillation") {
    const double rabi = 1e8;

    SUBCASE("resonant") {
        const double w = rabi;
        const double t_end = 20.0 * kPi / w;
        const auto grid = linspace(0.0, t_end, 800);
        const Trajectory traj = integrate(ground_state(),
                                          constant_h(0, 0, rabi, 2.0 * w),
                                          DecoherenceRates{}, t_end, grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            worst = std::max(worst, std::abs(traj.states[i].rho22 -
                                             analytic_detuned_rabi(grid[i], rabi, 0.0)));
        }
        CHECK(worst < 5e-6);
    }

    SUBCASE("detuned, static Hamiltonian") {
        const double detuning = 1e9;
        const double w = std::hypot(0.5 * detuning, rabi);
        const double t_end = 20.0 * kPi / w;
        const auto grid = linspace(0.0, t_end, 800);
        const Trajectory traj =
            integrate(ground_state(),
                      constant_h(-0.5 * detuning, 0.5 * detuning, rabi, 2.0 * w),
                      DecoherenceRates{}, t_end, grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            worst = std::max(worst,
                             std::abs(traj.states[i].rho22 -
                                      analytic_detuned_rabi(grid[i], rabi, detuning)));
        }
        CHECK(worst < 5e-6);

        // The oscillation peaks at 2 rabi^2 / W^2 at the half period.
        CHECK(analytic_detuned_rabi(0.5 * kPi / w, rabi, detuning) ==
              rel(0.0384615384615385, 1e-12));
        CHECK(analytic_detuned_rabi(0.0, rabi, detuning) == 0.0);
    }

    SUBCASE("detuned, rotating-carrier gauge") {
        // Same physics written as a rotating off-diagonal coupling; the
        // populations must be gauge invariant.
        const double detuning = 1e9;
        const double w = std::hypot(0.5 * detuning, rabi);
        FrameHamiltonian h;
        h.frame = Frame::Rwa;
        h.at = [rabi, detuning](double t) {
            Hermitian2 m;
            m.h12 = rabi * std::exp(std::complex<double>(0.0, detuning * t));
            return m;
        };
        h.max_frequency = detuning;
        h.time_independent = false;
        h.description = "test: rotating carrier";

        const double t_end = 20.0 * kPi / w;
        const auto grid = linspace(0.0, t_end, 800);
        const Trajectory traj = integrate(ground_state(), h, DecoherenceRates{},
                                          t_end, grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            worst = std::max(worst,
                             std::abs(traj.states[i].rho22 -
                                      analytic_detuned_rabi(grid[i], rabi, detuning)));
        }
        CHECK(worst < 5e-6);
    }
}

TEST_CASE("free decay relaxes population and coherence at the known rates") {
    const DecoherenceRates rates{1e7, 0.0, 0.0};
    const DensityMatrix rho0{0.5, 0.5, {0.35, 0.35}};
    const double t_end = 5.0 / rates.decay;
    const auto grid = linspace(0.0, t_end, 100);
    const Trajectory traj = integrate(rho0, constant_h(0, 0, {0, 0}, 0.0),
                                      rates, t_end, grid);
    const double gamma_perp = rates.coherence_decay();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        CHECK(traj.states[i].rho22 == rel(0.5 * std::exp(-rates.decay * t), 1e-7));
        CHECK(traj.states[i].rho12.real() ==
              rel(0.35 * std::exp(-gamma_perp * t), 1e-7));
        CHECK(traj.states[i].rho12.imag() ==
              rel(0.35 * std::exp(-gamma_perp * t), 1e-7));
    }
}

TEST_CASE("integration inputs are validated") {
    const FrameHamiltonian h = constant_h(0, 0, 1e8, 2e8);
    const DecoherenceRates rates{};
    const DensityMatrix rho0 = ground_state();

    CHECK_THROWS_AS((void)integrate(rho0, h, rates, -1.0, {0.0}), ConfigError);
    CHECK_THROWS_AS((void)integrate(rho0, h, rates, 1e-9, {}), ConfigError);
    CHECK_THROWS_AS((void)integrate(rho0, h, rates, 1e-9, {0.0, 2e-9}),
                    ConfigError);
    CHECK_THROWS_AS((void)integrate(rho0, h, rates, 1e-9, {-1e-10, 5e-10}),
                    ConfigError);
    CHECK_THROWS_AS((void)integrate(rho0, h, rates, 1e-9, {0.0, 5e-10, 5e-10}),
                    ConfigError);

    IntegratorOptions opts;
    opts.rel_tol = 0.0;
    CHECK_THROWS_AS((void)integrate(rho0, h, rates, 1e-9, {0.0, 1e-9}, opts),
                    ConfigError);
    opts = IntegratorOptions{};
    opts.fixed_step = -1e-12;
    CHECK_THROWS_AS((void)integrate(rho0, h, rates, 1e-9, {0.0, 1e-9}, opts),
                    ConfigError);
}

TEST_CASE("fixed steps land on the grid and are bitwise reproducible") {
    const FrameHamiltonian h = stark_frame_hamiltonian(base_config());
    const DecoherenceRates rates{1e7, 5e6, 5e6};
    const double t_end = 2e-8;
    const auto grid = linspace(0.0, t_end, 101);

    IntegratorOptions opts;
    opts.fixed_step = 5e-11;
    const Trajectory a = integrate(ground_state(), h, rates, t_end, grid, opts);
    const Trajectory b = integrate(ground_state(), h, rates, t_end, grid, opts);

    REQUIRE(a.states.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(a.times[i] == grid[i]);  // exact, not approximate
        CHECK(a.states[i].rho22 == b.states[i].rho22);
        CHECK(a.states[i].rho12 == b.states[i].rho12);
    }

    // 100 intervals of 2e-10 s subdivided into 4 equal 5e-11 s steps each.
    CHECK(a.stats.steps_accepted == 400);
    CHECK(a.stats.steps_rejected == 0);
    CHECK(a.stats.rhs_evaluations == 1 + 6 * a.stats.steps_accepted);

    // The adaptive path is deterministic as well.
    const Trajectory c = integrate(ground_state(), h, rates, t_end, grid);
    const Trajectory d = integrate(ground_state(), h, rates, t_end, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(c.states[i].rho22 == d.states[i].rho22);
        CHECK(c.states[i].rho12 == d.states[i].rho12);
    }
}

TEST_CASE("integrator statistics count every right-hand-side call") {
    const FrameHamiltonian h = stark_frame_hamiltonian(base_config());
    const DecoherenceRates rates{1e7, 5e6, 5e6};
    const double t_end = 2e-8;
    const auto grid = linspace(0.0, t_end, 101);
    const Trajectory traj = integrate(ground_state(), h, rates, t_end, grid);

    // The step ceiling ties the minimum step count to the fastest drive rate.
    CHECK(traj.stats.steps_accepted >= 238);
    CHECK(traj.stats.rhs_evaluations ==
          1 + 6 * (traj.stats.steps_accepted + traj.stats.steps_rejected));
    CHECK(traj.max_drive_frequency == rel(1.5e9, 1e-12));
    CHECK(traj.frame == Frame::StarkRotated);
}

TEST_CASE("a state driven out of the physical region raises IntegrationError") {
    // An absurdly large fixed step makes the explicit scheme unstable.
    const DecoherenceRates rates{1e9, 0.0, 0.0};
    const DensityMatrix excited{0.0, 1.0, {0.0, 0.0}};
    IntegratorOptions opts;
    opts.fixed_step = 1e-8;
    CHECK_THROWS_AS((void)integrate(excited, constant_h(0, 0, {0, 0}, 0.0),
                                    rates, 1e-7, {1e-7}, opts),
                    IntegrationError);
    try {
        (void)integrate(excited, constant_h(0, 0, {0, 0}, 0.0), rates, 1e-7,
                        {1e-7}, opts);
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(e.time >= 0.0);
        CHECK(e.time <= 1e-7);
        CHECK(std::string(e.what()).find("t = ") != std::string::npos);
    }
}

TEST_CASE("steady state of the matched mixer") {
    const FrameHamiltonian h = rwa_hamiltonian(base_config());
    REQUIRE(h.time_independent);
    const DecoherenceRates rates{1e7, 5e6, 5e6};

    const DensityMatrix fixed = steady_state(h, rates);
    CHECK(fixed.rho22 == rel(0.4807692307692308, 1e-12));  // 25/52
    CHECK(std::abs(fixed.rho12.real()) < 1e-12);
    CHECK(fixed.rho12.imag() == rel(-0.09615384615384616, 1e-12));  // -5/52
    CHECK(fixed.rho11 == rel(1.0 - 0.4807692307692308, 1e-12));

    // It really is a fixed point of the right-hand side.
    const DensityMatrixRate r = lindblad_rhs(0.0, fixed, h, rates);
    CHECK(std::abs(r.rho22_dot) < 1e-3);
    CHECK(std::abs(r.rho12_dot) < 1e-3);

    // And the long-time limit of the integrated dynamics.
    const double t_end = 1e-6;
    const auto grid = linspace(0.0, t_end, 200);
    const Trajectory traj =
        integrate(ground_state(), h, rates, t_end, grid);
    CHECK(std::abs(traj.states.back().rho22 - fixed.rho22) < 1e-4);
    CHECK(std::abs(traj.states.back().rho12 - fixed.rho12) < 1e-3);
}

TEST_CASE("steady-state solver error paths") {
    const DecoherenceRates rates{1e7, 5e6, 5e6};

    // Time-dependent generator: no fixed point to solve for.
    CHECK_THROWS_AS((void)steady_state(stark_frame_hamiltonian(base_config()),
                                       rates),
                    ConfigError);

    // No drive and no decoherence: nothing defines a scale.
    CHECK_THROWS_AS((void)steady_state(constant_h(0, 0, {0, 0}, 0.0),
                                       DecoherenceRates{}),
                    NumericsError);

    // Lossless drive: every orbit persists, the linear system is singular.
    CHECK_THROWS_AS((void)steady_state(constant_h(0, 0, 1e8, 2e8),
                                       DecoherenceRates{}),
                    NumericsError);

    // Pure decay with no drive relaxes to the ground state exactly.
    const DensityMatrix ground = steady_state(constant_h(0, 0, {0, 0}, 0.0),
                                              DecoherenceRates{1e7, 0.0, 0.0});
    CHECK(ground.rho22 == 0.0);
    CHECK(ground.rho12 == std::complex<double>(0.0, 0.0));
}

TEST_CASE("integrated trajectories stay physical") {
    const FrameHamiltonian h = stark_frame_hamiltonian(base_config());
    const DecoherenceRates rates{1e7, 5e6, 5e6};
    const double t_end = 1e-7;
    const auto grid = linspace(0.0, t_end, 500);
    const Trajectory traj = integrate(ground_state(), h, rates, t_end, grid);
    for (const DensityMatrix& state : traj.states) {
        CHECK_NOTHROW(state.validate(1e-8));
        CHECK(state.rho11 + state.rho22 == 1.0);
    }
}
