// surface_state.hpp — hydrogen-like spectrum of an electron bound above a
// liquid-helium surface.
//
// The attractive image potential -Lambda e^2 / z plus the hard wall at the
// surface (z = 0) gives a 1D Rydberg series E_n = -Lambda^2 e^4 m / (2 n^2
// hbar^2) with wavefunctions built from generalized Laguerre polynomials.
// The natural length is the effective Bohr radius r_B = hbar^2 / (m e^2
// Lambda), about three orders of magnitude larger than the atomic a_0, which
// is what pushes the level spacing down into the THz range.

#pragma once

#include <map>
#include <utility>

#include "helimix/constants.hpp"

namespace helimix {

// Spectrum and dipole data for the lowest few surface states.
// Invariants: lambda_param = image_strength(constants) exactly;
// energies[n] < 0 and energies[n] = energies[1] / n^2; the dipole table is
// symmetric, diagonal entries are positive, and every |z_ij| is a few r_B.
struct SurfaceStateModel {
    PhysicalConstants constants;
    double lambda_param = 0.0;  // dimensionless image-charge strength
    double bohr_radius = 0.0;   // effective Bohr radius, m
    std::map<int, double> energies;                         // n -> E_n, J
    std::map<std::pair<int, int>, double> dipole_elements;  // (i,j) -> z_ij, m

    // Lookup with range checking; throws std::domain_error for levels the
    // model was not built with.
    double energy(int n) const;
    double dipole(int i, int j) const;

    // 1 <-> 2 transition frequency (E_2 - E_1)/hbar, rad/s.
    double transition_angular_frequency() const;
    // Same in ordinary-frequency units, Hz.
    double transition_frequency() const;
};

// E_n = -Lambda^2 e^4 m / (2 n^2 hbar^2), J. Throws std::domain_error for
// n < 1 and ConfigError via constants.validate() for bad constants.
double energy_level(int n, const PhysicalConstants& c);

// r_B = hbar^2 / (m e^2 Lambda), m.
double bohr_radius(const PhysicalConstants& c);

// Generalized Laguerre polynomial L_n^{(alpha)}(x) by the three-term
// recurrence (numerically stable for the small n used here).
// Requires n >= 0 and alpha >= 0.
double laguerre(int n, int alpha, double x);

// Bound-state wavefunction psi_n(z), m^{-1/2}, for z >= 0:
//   psi_n(z) = r_B^{-1/2} * 2 n^{-5/2} x e^{-x/n} L_{n-1}^{(1)}(2x/n),
//   x = z / r_B.
// The states vanish at the wall; z < 0 throws std::domain_error.
double wavefunction(int n, double z, const SurfaceStateModel& model);

// Dipole matrix element z_ij = <i| z |j> in m, computed by adaptive
// Gauss-Kronrod quadrature on the dimensionless integrand, truncated at
// x = 40 * max(i,j) where the integrand is ~1e-17 of its peak. Closed forms
// for the low levels: z_11 = 1.5 r_B, z_22 = 6 r_B,
// z_12 = -(192/243) 2^{-1/2} r_B. Throws NumericsError if the quadrature
// error estimate exceeds 1e-10.
double dipole_matrix_element(int i, int j, const SurfaceStateModel& model);

// Builds the full model: image strength, Bohr radius, energies and the
// dipole table for levels 1..max_level (the two-level dynamics only needs
// max_level = 2; higher levels are available for spectrum checks).
SurfaceStateModel build_surface_model(const PhysicalConstants& c = {},
                                      int max_level = 2);

// Image strength that yields a requested Bohr radius, for building models
// pinned to a length instead of a dielectric constant.
double image_strength_for_bohr_radius(double r_b, const PhysicalConstants& c);

}  // namespace helimix
