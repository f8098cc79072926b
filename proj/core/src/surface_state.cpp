#include "helimix/surface_state.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

#include "helimix/errors.hpp"

namespace helimix {

namespace {

// Quadrature truncation: the dimensionless integrands decay like
// x^3 e^{-2x/n}; at x = 40 n they are below 1e-17 of their peak.
constexpr double kTruncationPerLevel = 40.0;
constexpr double kQuadratureTolerance = 1e-10;

void require_level(int n, const char* who) {
    if (n < 1) {
        throw std::domain_error(std::string(who) +
                                ": level index must be >= 1, got " +
                                std::to_string(n));
    }
}

// Dimensionless radial profile u_n(x) with psi_n(z) = r_B^{-1/2} u_n(z/r_B),
// normalized so that \int_0^inf u_n^2 dx = 1.
double reduced_wavefunction(int n, double x) {
    const double nn = static_cast<double>(n);
    return 2.0 * std::pow(nn, -2.5) * x * std::exp(-x / nn) *
           laguerre(n - 1, 1, 2.0 * x / nn);
}

}  // namespace

void PhysicalConstants::validate() const {
    if (!(charge > 0.0) || !(mass > 0.0) || !(hbar > 0.0)) {
        throw std::domain_error(
            "PhysicalConstants: charge, mass and hbar must be positive");
    }
    if (!(epsilon > 1.0)) {
        throw std::domain_error(
            "PhysicalConstants: epsilon must exceed 1 for an attractive "
            "image charge");
    }
}

double gaussian_charge_squared(const PhysicalConstants& c) {
    return c.charge * c.charge / (4.0 * kPi * kVacuumPermittivity);
}

double image_strength(const PhysicalConstants& c) {
    c.validate();
    return (c.epsilon - 1.0) / (4.0 * (c.epsilon + 1.0));
}

double epsilon_for_image_strength(double lambda) {
    if (!(lambda > 0.0) || !(lambda < 0.25)) {
        throw std::domain_error(
            "epsilon_for_image_strength: image strength must lie in (0, 1/4)");
    }
    return (1.0 + 4.0 * lambda) / (1.0 - 4.0 * lambda);
}

double energy_level(int n, const PhysicalConstants& c) {
    require_level(n, "energy_level");
    const double lambda = image_strength(c);
    const double e2 = gaussian_charge_squared(c);
    const double rydberg = lambda * lambda * e2 * e2 * c.mass /
                           (2.0 * c.hbar * c.hbar);
    return -rydberg / (static_cast<double>(n) * static_cast<double>(n));
}

double bohr_radius(const PhysicalConstants& c) {
    const double lambda = image_strength(c);
    return c.hbar * c.hbar / (c.mass * gaussian_charge_squared(c) * lambda);
}

double image_strength_for_bohr_radius(double r_b, const PhysicalConstants& c) {
    if (!(r_b > 0.0)) {
        throw std::domain_error(
            "image_strength_for_bohr_radius: radius must be positive");
    }
    return c.hbar * c.hbar / (c.mass * gaussian_charge_squared(c) * r_b);
}

double laguerre(int n, int alpha, double x) {
    if (n < 0) {
        throw std::domain_error("laguerre: order must be >= 0");
    }
    if (alpha < 0) {
        throw std::domain_error("laguerre: alpha must be >= 0");
    }
    // Upward recurrence in n:
    //   (k+1) L_{k+1} = (2k + alpha + 1 - x) L_k - (k + alpha) L_{k-1}.
    double prev = 1.0;  // L_0
    if (n == 0) return prev;
    double curr = 1.0 + alpha - x;  // L_1
    for (int k = 1; k < n; ++k) {
        const double next =
            ((2.0 * k + alpha + 1.0 - x) * curr - (k + alpha) * prev) /
            (k + 1.0);
        prev = curr;
        curr = next;
    }
    return curr;
}

double wavefunction(int n, double z, const SurfaceStateModel& model) {
    require_level(n, "wavefunction");
    if (z < 0.0) {
        throw std::domain_error(
            "wavefunction: states live above the surface, z must be >= 0");
    }
    return reduced_wavefunction(n, z / model.bohr_radius) /
           std::sqrt(model.bohr_radius);
}

double dipole_matrix_element(int i, int j, const SurfaceStateModel& model) {
    require_level(i, "dipole_matrix_element");
    require_level(j, "dipole_matrix_element");

    const double x_max = kTruncationPerLevel * static_cast<double>(std::max(i, j));
    const auto integrand = [i, j](double x) {
        return x * reduced_wavefunction(i, x) * reduced_wavefunction(j, x);
    };

    double error_estimate = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            integrand, 0.0, x_max, /*max_depth=*/15, /*tol=*/1e-12,
            &error_estimate);
    if (!(error_estimate < kQuadratureTolerance)) {
        throw NumericsError(
            "dipole_matrix_element: quadrature did not converge for (" +
            std::to_string(i) + "," + std::to_string(j) +
            "), error estimate " + std::to_string(error_estimate));
    }
    return value * model.bohr_radius;
}

double SurfaceStateModel::energy(int n) const {
    const auto it = energies.find(n);
    if (it == energies.end()) {
        throw std::domain_error("SurfaceStateModel: level " +
                                std::to_string(n) + " not in model");
    }
    return it->second;
}

double SurfaceStateModel::dipole(int i, int j) const {
    const auto it = dipole_elements.find({i, j});
    if (it == dipole_elements.end()) {
        throw std::domain_error("SurfaceStateModel: dipole (" +
                                std::to_string(i) + "," + std::to_string(j) +
                                ") not in model");
    }
    return it->second;
}

double SurfaceStateModel::transition_angular_frequency() const {
    return (energy(2) - energy(1)) / constants.hbar;
}

double SurfaceStateModel::transition_frequency() const {
    return transition_angular_frequency() / (2.0 * kPi);
}

SurfaceStateModel build_surface_model(const PhysicalConstants& c,
                                      int max_level) {
    if (max_level < 2) {
        throw std::domain_error(
            "build_surface_model: need at least levels 1 and 2");
    }
    SurfaceStateModel model;
    model.constants = c;
    model.lambda_param = image_strength(c);
    model.bohr_radius = bohr_radius(c);
    for (int n = 1; n <= max_level; ++n) {
        model.energies[n] = energy_level(n, c);
    }
    for (int i = 1; i <= max_level; ++i) {
        for (int j = i; j <= max_level; ++j) {
            const double z_ij = dipole_matrix_element(i, j, model);
            model.dipole_elements[{i, j}] = z_ij;
            model.dipole_elements[{j, i}] = z_ij;
        }
    }
    return model;
}

}  // namespace helimix
