#include "helimix/lindblad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "helimix/errors.hpp"

namespace helimix {

namespace {

using Vec3 = std::array<double, 3>;  // (rho22, Re rho12, Im rho12)

// The integrator flags a state as broken at 10x the validation tolerance:
// transient excursions of a few ulp are fine, anything larger means the
// step control lost the solution.
constexpr double kStateTolerance = 1e-9;
constexpr double kBreakdownTolerance = 10.0 * kStateTolerance;

// Oscillation resolution floor: never step over more than ~1/50 of the
// fastest drive period, even where the controller thinks the solution is
// smooth (a weakly driven state looks flat while the drive phase spins).
constexpr double kStepsPerDrivePeriod = 50.0;

DensityMatrix state_from(const Vec3& y) {
    DensityMatrix rho;
    rho.rho22 = y[0];
    rho.rho11 = 1.0 - y[0];
    rho.rho12 = {y[1], y[2]};
    return rho;
}

void check_physical(const Vec3& y, double t) {
    for (double v : y) {
        if (!std::isfinite(v)) {
            throw IntegrationError("integrate: state turned non-finite", t);
        }
    }
    const double rho22 = y[0];
    const double rho11 = 1.0 - rho22;
    if (rho22 < -kBreakdownTolerance || rho22 > 1.0 + kBreakdownTolerance) {
        throw IntegrationError(
            "integrate: population left [0, 1] (rho22 = " +
                std::to_string(rho22) + ")",
            t);
    }
    const double coherence2 = y[1] * y[1] + y[2] * y[2];
    if (coherence2 > rho11 * rho22 + kBreakdownTolerance) {
        throw IntegrationError(
            "integrate: coherence exceeds the positivity bound", t);
    }
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 5th-order minus embedded 4th-order weights (error estimator).
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600;
constexpr double e3 = 500.0 / 1113 - 7571.0 / 16695;
constexpr double e4 = 125.0 / 192 - 393.0 / 640;
constexpr double e5 = -2187.0 / 6784 + 92097.0 / 339200;
constexpr double e6 = 11.0 / 84 - 187.0 / 2100;
constexpr double e7 = -1.0 / 40;

class Stepper {
  public:
    Stepper(const FrameHamiltonian& hamiltonian, const DecoherenceRates& rates,
            IntegratorStats& stats)
        : hamiltonian_(hamiltonian),
          gamma_decay_(rates.decay),
          gamma_perp_(rates.coherence_decay()),
          stats_(stats) {}

    Vec3 rhs(double t, const Vec3& y) {
        ++stats_.rhs_evaluations;
        const Hermitian2 m = hamiltonian_.at(t);
        const std::complex<double> rho12{y[1], y[2]};
        const double pump =
            2.0 * (m.h12.real() * y[2] - m.h12.imag() * y[1]);
        const std::complex<double> rho12_dot =
            std::complex<double>(0.0, -(m.h11 - m.h22)) * rho12 +
            std::complex<double>(0.0, 1.0) * m.h12 * (1.0 - 2.0 * y[0]) -
            gamma_perp_ * rho12;
        return {pump - gamma_decay_ * y[0], rho12_dot.real(),
                rho12_dot.imag()};
    }

    // One 5th-order step from (t, y, k1 = rhs(t, y)); fills the new slope
    // k_end = rhs(t + h, y_new) (FSAL) and the embedded error estimate.
    Vec3 step(double t, const Vec3& y, const Vec3& k1, double h, Vec3& k_end,
              Vec3& error) {
        const auto at = [&](double c, const Vec3& incr) {
            Vec3 v;
            for (int i = 0; i < 3; ++i) v[i] = y[i] + h * incr[i];
            return rhs(t + c * h, v);
        };
        const Vec3 k2 = at(c2, {a21 * k1[0], a21 * k1[1], a21 * k1[2]});
        Vec3 w;
        for (int i = 0; i < 3; ++i) w[i] = a31 * k1[i] + a32 * k2[i];
        const Vec3 k3 = at(c3, w);
        for (int i = 0; i < 3; ++i) w[i] = a41 * k1[i] + a42 * k2[i] + a43 * k3[i];
        const Vec3 k4 = at(c4, w);
        for (int i = 0; i < 3; ++i)
            w[i] = a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i];
        const Vec3 k5 = at(c5, w);
        for (int i = 0; i < 3; ++i)
            w[i] = a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                   a65 * k5[i];
        const Vec3 k6 = at(1.0, w);

        Vec3 y_new;
        for (int i = 0; i < 3; ++i) {
            y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                   b5 * k5[i] + b6 * k6[i]);
        }
        k_end = rhs(t + h, y_new);
        for (int i = 0; i < 3; ++i) {
            error[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                            e5 * k5[i] + e6 * k6[i] + e7 * k_end[i]);
        }
        return y_new;
    }

  private:
    const FrameHamiltonian& hamiltonian_;
    double gamma_decay_;
    double gamma_perp_;
    IntegratorStats& stats_;
};

}  // namespace

void DensityMatrix::validate(double tol) const {
    if (!std::isfinite(rho11) || !std::isfinite(rho22) ||
        !std::isfinite(rho12.real()) || !std::isfinite(rho12.imag())) {
        throw std::domain_error("DensityMatrix: non-finite entry");
    }
    if (std::abs(rho11 + rho22 - 1.0) > tol) {
        throw std::domain_error("DensityMatrix: trace differs from 1 by " +
                                std::to_string(rho11 + rho22 - 1.0));
    }
    if (rho11 < -tol || rho11 > 1.0 + tol || rho22 < -tol ||
        rho22 > 1.0 + tol) {
        throw std::domain_error("DensityMatrix: population outside [0, 1]");
    }
    if (std::norm(rho12) > rho11 * rho22 + tol) {
        throw std::domain_error(
            "DensityMatrix: coherence violates positivity, |rho12|^2 > "
            "rho11 rho22");
    }
}

DensityMatrix ground_state() { return DensityMatrix{}; }

double DecoherenceRates::coherence_decay() const {
    return 0.5 * (decay + dephasing1 + dephasing2);
}

void DecoherenceRates::validate() const {
    if (decay < 0.0 || dephasing1 < 0.0 || dephasing2 < 0.0) {
        throw std::domain_error("DecoherenceRates: rates must be >= 0");
    }
}

DensityMatrixRate lindblad_rhs(double t, const DensityMatrix& rho,
                               const FrameHamiltonian& hamiltonian,
                               const DecoherenceRates& rates) {
    const Hermitian2 m = hamiltonian.at(t);
    const double pump = 2.0 * std::imag(std::conj(m.h12) * rho.rho12);
    DensityMatrixRate rate;
    rate.rho22_dot = pump - rates.decay * rho.rho22;
    rate.rho11_dot = -pump + rates.decay * rho.rho22;
    rate.rho12_dot = std::complex<double>(0.0, -(m.h11 - m.h22)) * rho.rho12 +
                     std::complex<double>(0.0, 1.0) * m.h12 *
                         (rho.rho11 - rho.rho22) -
                     rates.coherence_decay() * rho.rho12;
    return rate;
}

Trajectory integrate(const DensityMatrix& rho0,
                     const FrameHamiltonian& hamiltonian,
                     const DecoherenceRates& rates, double t_end,
                     const std::vector<double>& output_grid,
                     const IntegratorOptions& options) {
    rho0.validate();
    rates.validate();
    if (!(t_end > 0.0)) {
        throw ConfigError("integrate: t_end must be positive");
    }
    if (output_grid.empty()) {
        throw ConfigError("integrate: output grid is empty");
    }
    for (std::size_t i = 0; i < output_grid.size(); ++i) {
        if (!(output_grid[i] >= 0.0) ||
            output_grid[i] > t_end * (1.0 + 1e-12)) {
            throw ConfigError("integrate: output grid leaves [0, t_end]");
        }
        if (i > 0 && !(output_grid[i] > output_grid[i - 1])) {
            throw ConfigError("integrate: output grid must be strictly "
                              "increasing");
        }
    }
    if (!(options.rel_tol > 0.0) || options.abs_tol < 0.0) {
        throw ConfigError("integrate: tolerances must be positive");
    }
    if (options.fixed_step && !(*options.fixed_step > 0.0)) {
        throw ConfigError("integrate: fixed step must be positive");
    }

    Trajectory traj;
    traj.frame = hamiltonian.frame;
    traj.max_drive_frequency = hamiltonian.max_frequency;
    traj.times.reserve(output_grid.size());
    traj.states.reserve(output_grid.size());

    Stepper stepper(hamiltonian, rates, traj.stats);

    const double span = t_end;
    const double step_ceiling =
        hamiltonian.max_frequency > 0.0
            ? 2.0 * kPi / (kStepsPerDrivePeriod * hamiltonian.max_frequency)
            : span;

    Vec3 y = {rho0.rho22, rho0.rho12.real(), rho0.rho12.imag()};
    double t = 0.0;
    Vec3 k1 = stepper.rhs(t, y);

    const auto record = [&](double at) {
        traj.times.push_back(at);
        traj.states.push_back(state_from(y));
    };

    if (options.fixed_step) {
        const double requested = std::min(*options.fixed_step, step_ceiling);
        for (double target : output_grid) {
            const double dt = target - t;
            if (dt <= 0.0) {
                record(target);
                continue;
            }
            const auto substeps = static_cast<long long>(
                std::ceil(dt / requested * (1.0 - 1e-14)));
            const double h = dt / static_cast<double>(std::max(1LL, substeps));
            Vec3 k_end, error;
            for (long long s = 0; s < std::max(1LL, substeps); ++s) {
                y = stepper.step(t, y, k1, h, k_end, error);
                t += h;
                k1 = k_end;
                ++traj.stats.steps_accepted;
                check_physical(y, t);
            }
            t = target;  // dt was split exactly; pin away rounding drift
            record(target);
        }
        return traj;
    }

    // Adaptive mode: classic proportional step control on the embedded
    // error, clipped to land exactly on each output time.
    double h = std::min(step_ceiling, span / 100.0);
    for (double target : output_grid) {
        while (t < target) {
            // Clip the trial step to land exactly on the output time; a
            // clipped step must not feed the controller (its size says
            // nothing about the error dynamics).
            double h_try = h;
            bool clipped = false;
            if (h_try >= target - t) {
                h_try = target - t;
                clipped = true;
            }
            Vec3 k_end, error;
            const Vec3 y_new = stepper.step(t, y, k1, h_try, k_end, error);

            double err = 0.0;
            for (int i = 0; i < 3; ++i) {
                const double scale =
                    options.abs_tol +
                    options.rel_tol *
                        std::max(std::abs(y[i]), std::abs(y_new[i]));
                const double r = error[i] / scale;
                err += r * r;
            }
            err = std::sqrt(err / 3.0);

            if (err <= 1.0) {
                t = clipped ? target : t + h_try;
                y = y_new;
                k1 = k_end;
                ++traj.stats.steps_accepted;
                check_physical(y, t);
                if (!clipped) {
                    const double grow =
                        err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                    h = std::min(step_ceiling,
                                 h_try * std::clamp(grow, 0.2, 5.0));
                }
            } else {
                ++traj.stats.steps_rejected;
                h = h_try * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9);
            }
            if (!(h > span * 1e-15)) {
                throw IntegrationError(
                    "integrate: step size underflow (error control cannot "
                    "satisfy the tolerance)",
                    t);
            }
        }
        record(target);
    }
    return traj;
}

double analytic_detuned_rabi(double t, double rabi, double detuning) {
    const double w = std::hypot(0.5 * detuning, rabi);
    if (w == 0.0) return 0.0;
    const double amplitude = rabi * rabi / (2.0 * w * w);
    return amplitude * (1.0 - std::cos(2.0 * w * t));
}

DensityMatrix steady_state(const FrameHamiltonian& hamiltonian,
                           const DecoherenceRates& rates) {
    if (!hamiltonian.time_independent) {
        throw ConfigError(
            "steady_state: Hamiltonian is time-dependent; no fixed point");
    }
    rates.validate();

    const Hermitian2 m = hamiltonian.at(0.0);
    const double a = m.h12.real();
    const double b = m.h12.imag();
    const double dh = m.h11 - m.h22;
    const double decay = rates.decay;
    const double perp = rates.coherence_decay();

    // Fixed point of (rho22, u, v) with u + iv = rho12:
    //   -decay rho22 - 2b u + 2a v = 0
    //    2b rho22 - perp u + dh v  = b
    //   -2a rho22 - dh u - perp v  = -a
    double mat[3][4] = {
        {-decay, -2.0 * b, 2.0 * a, 0.0},
        {2.0 * b, -perp, dh, b},
        {-2.0 * a, -dh, -perp, -a},
    };

    const double scale = std::max({std::abs(decay), std::abs(perp),
                                   2.0 * std::abs(a), 2.0 * std::abs(b),
                                   std::abs(dh)});
    if (scale == 0.0) {
        throw NumericsError(
            "steady_state: no drive and no decoherence; every state is "
            "stationary");
    }

    // Gaussian elimination with partial pivoting on the 3x4 system.
    double det = 1.0;
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(mat[r][col]) > std::abs(mat[pivot][col])) pivot = r;
        }
        if (pivot != col) {
            std::swap(mat[pivot], mat[col]);
            det = -det;
        }
        det *= mat[col][col];
        if (std::abs(mat[col][col]) <= 1e-14 * scale) {
            throw NumericsError(
                "steady_state: singular system; the fixed point is not "
                "unique (zero decoherence with coherent drive?)");
        }
        for (int r = col + 1; r < 3; ++r) {
            const double f = mat[r][col] / mat[col][col];
            for (int cc = col; cc < 4; ++cc) mat[r][cc] -= f * mat[col][cc];
        }
    }
    (void)det;

    double x[3];
    for (int r = 2; r >= 0; --r) {
        double sum = mat[r][3];
        for (int cc = r + 1; cc < 3; ++cc) sum -= mat[r][cc] * x[cc];
        x[r] = sum / mat[r][r];
    }

    DensityMatrix rho;
    rho.rho22 = x[0];
    rho.rho11 = 1.0 - x[0];
    rho.rho12 = {x[1], x[2]};
    return rho;
}

}  // namespace helimix
