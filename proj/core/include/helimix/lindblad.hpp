// lindblad.hpp — driven-dissipative evolution of the two-level density
// matrix.
//
// The master equation couples a frame Hamiltonian (from drive_mixing) to
// three dissipators: population decay 2 -> 1 at rate decay, and pure
// dephasing of each level at dephasing1/dephasing2. Only three real numbers
// evolve — (rho22, Re rho12, Im rho12) — with rho11 = 1 - rho22 and
// rho21 = conj(rho12) implied. The integrator is an adaptive embedded
// Runge-Kutta 5(4) pair with a step ceiling tied to the fastest drive
// frequency, plus a fixed-step mode for bitwise-reproducible runs.

#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "helimix/drive_mixing.hpp"

namespace helimix {

// Two-level density matrix. Physical states have unit trace, populations in
// [0, 1] and |rho12|^2 <= rho11 * rho22.
struct DensityMatrix {
    double rho11 = 1.0;
    double rho22 = 0.0;
    std::complex<double> rho12{0.0, 0.0};

    // Throws std::domain_error if trace, population bounds or positivity are
    // violated beyond tol.
    void validate(double tol = 1e-9) const;
};

// Ground state |1><1|.
DensityMatrix ground_state();

struct DensityMatrixRate {
    double rho11_dot = 0.0;
    double rho22_dot = 0.0;
    std::complex<double> rho12_dot{0.0, 0.0};
};

// Dissipation rates, 1/s. coherence_decay is the transverse rate
// (decay + dephasing1 + dephasing2) / 2 that damps rho12.
struct DecoherenceRates {
    double decay = 0.0;       // population relaxation 2 -> 1
    double dephasing1 = 0.0;  // pure dephasing of level 1
    double dephasing2 = 0.0;  // pure dephasing of level 2

    double coherence_decay() const;
    // Throws std::domain_error if any rate is negative.
    void validate() const;
};

struct IntegratorStats {
    long long steps_accepted = 0;
    long long steps_rejected = 0;
    long long rhs_evaluations = 0;
};

struct IntegratorOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    // When set, integrate with this constant step (subdivided exactly to hit
    // every output time) and no error control: runs become bitwise
    // reproducible across repeats.
    std::optional<double> fixed_step;
};

// Time series of density-matrix states on the requested output grid.
// Invariants: times strictly increasing; every state passes validate();
// max_drive_frequency records the fastest angular rate of the Hamiltonian
// that generated it (the spectrum code checks sampling against it).
struct Trajectory {
    Frame frame = Frame::StarkRotated;
    std::vector<double> times;  // s
    std::vector<DensityMatrix> states;
    double max_drive_frequency = 0.0;  // rad/s
    IntegratorStats stats;
};

// Right-hand side of the master equation at time t:
//   rho22' = 2 Im(conj(h12) rho12) - decay * rho22
//   rho12' = -i (h11 - h22) rho12 + i h12 (rho11 - rho22)
//            - coherence_decay * rho12
// and rho11' = -rho22' restored by the decay gain term. The populations'
// rates always sum to zero (trace preservation).
DensityMatrixRate lindblad_rhs(double t, const DensityMatrix& rho,
                               const FrameHamiltonian& hamiltonian,
                               const DecoherenceRates& rates);

// Integrates from rho0 at t = 0 and samples the state at every time in
// output_grid (strictly increasing, within [0, t_end]). Throws
// IntegrationError if the state leaves the physical region by more than
// 10x the validation tolerance or turns non-finite — no silent clamping.
Trajectory integrate(const DensityMatrix& rho0,
                     const FrameHamiltonian& hamiltonian,
                     const DecoherenceRates& rates, double t_end,
                     const std::vector<double>& output_grid,
                     const IntegratorOptions& options = {});

// Closed-form excited population of a lossless, constantly driven two-level
// system starting in the ground state:
//   P_e(t) = rabi^2 / (2 W^2) * (1 - cos(2 W t)),  W = sqrt(detuning^2/4 +
//   rabi^2).
// Oracle for the integrator against an independent derivation.
double analytic_detuned_rabi(double t, double rabi, double detuning);

// Unique fixed point of the master equation for a time-independent
// Hamiltonian, by direct solve of the 3x3 linear system. Throws ConfigError
// if the Hamiltonian is time-dependent, NumericsError if the system is
// singular (e.g. no decoherence: every pure trajectory persists).
DensityMatrix steady_state(const FrameHamiltonian& hamiltonian,
                           const DecoherenceRates& rates);

}  // namespace helimix
