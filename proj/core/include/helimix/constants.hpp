// constants.hpp — physical constants and the helium image-charge parameters.
//
// Everything downstream works in SI (J, m, s, rad/s). The bound-state
// formulas are written with the Gaussian-convention squared charge
// e^2 = q^2 / (4 pi eps0), which carries units of J*m; that shorthand is
// provided here so the spectrum code reads like the closed-form expressions.

#pragma once

namespace helimix {

inline constexpr double kPi = 3.14159265358979323846;

// CODATA 2018 exact/recommended values, SI.
inline constexpr double kElementaryCharge = 1.602176634e-19;   // C
inline constexpr double kElectronMass = 9.1093837015e-31;      // kg
inline constexpr double kHbar = 1.054571817e-34;               // J s
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m

// 1 eV in J (exact since the 2019 SI redefinition).
inline constexpr double kElectronVolt = 1.602176634e-19;

// Model inputs for the electron-on-helium surface states. The default
// dielectric constant is that of bulk liquid helium; override it (or any
// constant) to explore other substrates.
struct PhysicalConstants {
    double charge = kElementaryCharge;       // C
    double mass = kElectronMass;             // kg
    double hbar = kHbar;                     // J s
    double epsilon = 1.0568;                 // relative permittivity of the liquid

    // Throws std::domain_error if any entry is non-positive or epsilon <= 1
    // (an attractive image charge needs a dielectric denser than vacuum).
    void validate() const;
};

// Gaussian-convention squared charge: q^2 / (4 pi eps0), in J*m.
double gaussian_charge_squared(const PhysicalConstants& c);

// Image-charge strength Lambda = (eps - 1) / (4 (eps + 1)), dimensionless.
double image_strength(const PhysicalConstants& c);

// Dielectric constant that produces a requested image strength; inverse of
// image_strength. Requires 0 < lambda < 1/4.
double epsilon_for_image_strength(double lambda);

}  // namespace helimix
