// drive_mixing.hpp — two-tone drive of the surface-state qubit and the
// Hamiltonians it produces in each rotating frame.
//
// A near-resonant THz tone couples levels 1 and 2 (transition coupling
// Omega_120); one or two GHz tones Stark-shift the levels through their
// static dipoles (couplings Omega_110, Omega_220). Rotating away the fast
// diagonal drive turns the level shifts into a phase modulation of the
// off-diagonal coupling with modulation index xi; its first sideband acts as
// the slow effective drive that makes the electron a frequency mixer.
//
// Sign convention: the coupling constants are u_ij E / (2 hbar) with
// u_ij = q z_ij. Since z_12 < 0 and z_11 < z_22, a field pointed away from
// the surface gives negative Omega_120 and xi. The dynamics of the level
// populations only feel relative phases, so the coupling-first builder
// accepts signed values (captions usually quote them positive) and the
// stored field amplitudes are magnitudes.

#pragma once

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "helimix/surface_state.hpp"

namespace helimix {

enum class ToneRole {
    ThzTransition,  // drives the 1 <-> 2 transition near omega12
    GhzStark,       // modulates the level energies through z_11, z_22
};

// One drive tone as applied in the lab: field magnitude along z, angular
// frequency and phase.
struct DriveTone {
    ToneRole role = ToneRole::GhzStark;
    double amplitude = 0.0;          // V/m, >= 0
    double angular_frequency = 0.0;  // rad/s, > 0
    double phase = 0.0;              // rad
};

// Derived couplings of one Stark (GHz) tone.
struct StarkTone {
    double stark11 = 0.0;    // Omega_110 = u_11 E / (2 hbar), rad/s
    double stark22 = 0.0;    // Omega_220 = u_22 E / (2 hbar), rad/s
    double xi = 0.0;         // modulation index 2 (Omega_110 - Omega_220) / omega_g
    double omega_g = 0.0;    // rad/s
    double phase = 0.0;      // rad
    double amplitude = 0.0;  // field magnitude, V/m (diagnostic)
};

// Complete drive configuration tied to one surface-state model.
// Invariants: exactly one THz tone, one or two Stark tones; omega_eff =
// -rabi * stark[0].xi / 2; warnings lists every rotating-wave guard that
// tripped (|xi| > 0.7, |rabi| > 0.3 omega_g).
struct MixingConfig {
    double omega12 = 0.0;       // transition frequency, rad/s
    double omega_thz = 0.0;     // THz tone frequency, rad/s
    double detuning = 0.0;      // Delta = omega_thz - omega12, rad/s
    double rabi = 0.0;          // Omega_120, rad/s, signed
    double thz_phase = 0.0;     // rad
    double thz_amplitude = 0.0; // V/m (diagnostic)
    std::vector<StarkTone> stark;
    double omega_eff = 0.0;     // effective mixer coupling, rad/s, signed
    std::vector<std::string> warnings;

    // |Omega_120|; sets the dimensionless time T = |Omega_120| t and the
    // frequency axis of the spectra.
    double rabi_magnitude() const;
    // delta = Delta - omega_g of the first Stark tone: the detuning left
    // after the mixer has supplied one GHz quantum.
    double small_detuning() const;
};

// Builds the configuration from lab-frame tones. Derives all couplings from
// the model's dipole elements; amplitudes must be >= 0 and frequencies > 0.
// Throws ConfigError for a tone set that is not one THz + one or two Stark.
MixingConfig build_mixing(const SurfaceStateModel& model,
                          const std::vector<DriveTone>& tones);

// Coupling-first builder: specify signed Omega_120, the THz detuning from
// resonance, and per-tone modulation indices; the field amplitudes are
// back-derived as magnitudes. This is how scenario captions are phrased.
struct StarkSetting {
    double xi = 0.0;       // signed modulation index
    double omega_g = 0.0;  // rad/s, > 0
    double phase = 0.0;    // rad
};
MixingConfig build_mixing_from_couplings(const SurfaceStateModel& model,
                                         double rabi, double detuning,
                                         double thz_phase,
                                         const std::vector<StarkSetting>& stark);

// Field magnitudes that realize a requested coupling (inverse of the
// derivations in build_mixing).
double stark_amplitude_for_xi(const SurfaceStateModel& model, double xi,
                              double omega_g);
double thz_amplitude_for_rabi(const SurfaceStateModel& model, double rabi);

// The full drive phase factor of the Stark-rotated frame off-diagonal:
//   exp(i [theta_T + Delta t + sum_k xi_k sin(omega_k t + theta_k)]).
// Unit modulus by construction.
std::complex<double> phase_factor(double t, const MixingConfig& config);

// Bessel function J_n(x) for any integer order and real argument
// (reflection identities reduce to the n >= 0, x >= 0 case).
double bessel_j(int n, double x);

// Sideband weights of the phase modulation: n -> J_n(xi) for |n| <= n_max.
// At xi = 0 only n = 0 survives; for small xi, J_{-1} ~ -xi/2 is the mixer
// coefficient.
std::map<int, double> jacobi_anger_coefficients(double xi, int n_max);

// Accumulated diagonal drive phases of the Stark rotation,
//   theta_nn(t) = sum_k (2 Omega_nn0_k / omega_k) sin(omega_k t + theta_k);
// their difference is the phase-modulation argument xi sin(omega_g t +
// theta_g) per tone.
struct StarkAngles {
    double theta11 = 0.0;
    double theta22 = 0.0;
};
StarkAngles stark_frame_angles(double t, const MixingConfig& config);

// Frames the master equation can run in. The population rho22 is identical
// in all of them; coherences differ by known phase maps.
enum class Frame {
    Interaction,   // fast diagonal drive explicit (Eq. of motion stiffest)
    StarkRotated,  // diagonal drive rotated into the off-diagonal phase
    Rwa,           // slowest stationary term of the sideband expansion kept
};

// Short lowercase tag for filenames and CSV/JSON labels.
std::string frame_name(Frame frame);
Frame frame_from_name(const std::string& name);

// 2x2 Hermitian Hamiltonian divided by hbar, rad/s. h21 is implied.
struct Hermitian2 {
    double h11 = 0.0;
    double h22 = 0.0;
    std::complex<double> h12{0.0, 0.0};

    // Row-major {h11, h12, h21, h22} with h21 = conj(h12).
    std::array<std::complex<double>, 4> as_matrix() const;
};

// Which stationary term the rotating-wave reduction keeps.
enum class RwaForm {
    Auto,           // slowest term with a nonzero coefficient
    Carrier,        // bare transition drive at Delta (no sideband)
    SingleSideband, // first Stark tone supplies one quantum
    TwoSideband,    // both Stark tones contribute a sideband each
};

// Time-dependent Hamiltonian of one frame, with hints the integrator and
// spectrum code use: the fastest angular rate present and whether the
// generator is constant.
struct FrameHamiltonian {
    Frame frame = Frame::StarkRotated;
    std::function<Hermitian2(double)> at;
    double max_frequency = 0.0;  // rad/s
    bool time_independent = false;
    std::string description;
};

// Interaction frame: diagonals 2 Omega_nn0 cos(omega_g t + theta_g) per
// tone, off-diagonal rabi * exp(i(Delta t + theta_T)).
FrameHamiltonian interaction_frame_hamiltonian(const MixingConfig& config);

// Stark-rotated frame: zero diagonal, off-diagonal rabi * phase_factor(t).
FrameHamiltonian stark_frame_hamiltonian(const MixingConfig& config);

// Rotating-wave reduction. Auto keeps the slowest-rotating term that has a
// nonzero coefficient: the n = -1 (or +1) sideband of each Stark tone when
// the mixer is near resonance, else the carrier. Requesting TwoSideband
// with fewer than two Stark tones throws ConfigError.
FrameHamiltonian rwa_hamiltonian(const MixingConfig& config,
                                 RwaForm form = RwaForm::Auto);

}  // namespace helimix
