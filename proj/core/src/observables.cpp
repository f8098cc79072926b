#include "helimix/observables.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "helimix/errors.hpp"

namespace helimix {

namespace {

// Uniform-grid check: spacing jitter beyond this relative bound means the
// samples cannot feed a DFT.
constexpr double kGridUniformityTol = 1e-9;

std::vector<std::complex<double>> transform(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    std::vector<std::complex<double>> in(n), out(n);
    for (std::size_t i = 0; i < n; ++i) in[i] = samples[i];

    fftw_plan plan = fftw_plan_dft_1d(
        static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
        reinterpret_cast<fftw_complex*>(out.data()),
        FFTW_BACKWARD,  // +i kernel: psi_k = sum_n x_n e^{+2 pi i k n / N}
        FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    // Normalize by N and rotate so frequencies run from most negative to
    // most positive with the zero bin in the middle.
    const std::size_t half = n / 2;
    std::vector<std::complex<double>> shifted(n);
    for (std::size_t i = 0; i < n; ++i) {
        shifted[i] = out[(i + n - half) % n] / static_cast<double>(n);
    }
    return shifted;
}

SpectrumResult transform_trajectory(const Trajectory& traj,
                                    SpectrumWindow window,
                                    const MixingConfig& config,
                                    bool remove_mean) {
    const std::size_t n = traj.times.size();
    if (n < 2 || traj.states.size() != n) {
        throw ConfigError("spectrum: need at least two uniformly spaced "
                          "samples");
    }
    const double dt = traj.times[1] - traj.times[0];
    if (!(dt > 0.0)) {
        throw ConfigError("spectrum: sample times must increase");
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double step = traj.times[i] - traj.times[i - 1];
        if (std::abs(step - dt) > kGridUniformityTol * dt) {
            throw ConfigError("spectrum: sample grid is not uniform");
        }
    }

    SpectrumResult result;
    result.window = window;
    result.mean_removed = remove_mean;

    // Dimensionless time scale; without a transition coupling there is no
    // natural unit and the axis stays in rad/s.
    double scale = config.rabi_magnitude();
    if (scale <= 0.0) {
        scale = 1.0;
        result.warnings.push_back(
            "spectrum: transition coupling is zero; frequency axis is in "
            "rad/s instead of coupling units");
    }
    const double dt_dimless = scale * dt;

    if (traj.max_drive_frequency > 0.0) {
        const double nyquist = kPi / dt;  // rad/s
        if (traj.max_drive_frequency > nyquist) {
            result.warnings.push_back(
                "spectrum: fastest drive frequency exceeds the sampling "
                "Nyquist rate; fast components alias");
        }
    }

    std::vector<double> x22(n), xr(n), xi(n);
    for (std::size_t i = 0; i < n; ++i) {
        x22[i] = traj.states[i].rho22;
        xr[i] = traj.states[i].rho12.real();
        xi[i] = traj.states[i].rho12.imag();
    }
    if (remove_mean) {
        for (auto* series : {&x22, &xr, &xi}) {
            double mean = 0.0;
            for (double v : *series) mean += v;
            mean /= static_cast<double>(n);
            for (double& v : *series) v -= mean;
        }
    }
    if (window == SpectrumWindow::Hann) {
        // Periodic Hann, compensated by its coherent gain of exactly 1/2.
        for (std::size_t i = 0; i < n; ++i) {
            const double w =
                (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                static_cast<double>(n)));
            x22[i] *= w;
            xr[i] *= w;
            xi[i] *= w;
        }
    }

    result.psi22 = transform(x22);
    result.psi_re12 = transform(xr);
    result.psi_im12 = transform(xi);

    result.bin_width = 2.0 * kPi / (static_cast<double>(n) * dt_dimless);
    result.omega.resize(n);
    const auto half = static_cast<long long>(n / 2);
    for (std::size_t i = 0; i < n; ++i) {
        result.omega[i] =
            static_cast<double>(static_cast<long long>(i) - half) *
            result.bin_width;
    }
    return result;
}

const std::vector<std::complex<double>>& series_of(const SpectrumResult& r,
                                                   SpectrumSeries series) {
    switch (series) {
        case SpectrumSeries::Population: return r.psi22;
        case SpectrumSeries::CoherenceReal: return r.psi_re12;
        case SpectrumSeries::CoherenceImag: return r.psi_im12;
    }
    throw std::domain_error("series_of: unknown series");
}

}  // namespace

void ImageChargeGeometry::validate() const {
    if (!(electron_count > 0.0) || !(plate_separation > 0.0)) {
        throw std::domain_error(
            "ImageChargeGeometry: electron count and plate separation must "
            "be positive");
    }
}

std::string window_name(SpectrumWindow window) {
    switch (window) {
        case SpectrumWindow::Rectangular: return "rectangular";
        case SpectrumWindow::Hann: return "hann";
    }
    throw std::domain_error("window_name: unknown window");
}

SpectrumWindow window_from_name(const std::string& name) {
    if (name == "rectangular") return SpectrumWindow::Rectangular;
    if (name == "hann") return SpectrumWindow::Hann;
    throw ConfigError("window_from_name: unknown window '" + name + "'");
}

double expectation_z(const DensityMatrix& rho, double t, Frame frame,
                     const MixingConfig& config,
                     const SurfaceStateModel& model) {
    if (frame == Frame::Interaction) {
        throw ConfigError(
            "expectation_z: interaction-frame states carry the fast diagonal "
            "rotation; evolve in the stark or rwa frame instead");
    }
    const double z11 = model.dipole(1, 1);
    const double z22 = model.dipole(2, 2);
    const double z12 = model.dipole(1, 2);

    double angle = config.omega12 * t;
    for (const StarkTone& tone : config.stark) {
        angle -= tone.xi * std::sin(tone.omega_g * t + tone.phase);
    }
    const std::complex<double> rotated =
        rho.rho12 * std::complex<double>(std::cos(angle), std::sin(angle));
    return z11 * rho.rho11 + z22 * rho.rho22 + 2.0 * z12 * rotated.real();
}

double image_charge(double rho22, const ImageChargeGeometry& geometry,
                    const SurfaceStateModel& model) {
    geometry.validate();
    if (rho22 < -1e-9 || rho22 > 1.0 + 1e-9) {
        throw std::domain_error("image_charge: rho22 outside [0, 1]");
    }
    const double dz = model.dipole(2, 2) - model.dipole(1, 1);
    return model.constants.charge * geometry.electron_count * dz * rho22 /
           geometry.plate_separation;
}

SpectrumResult spectrum(const Trajectory& trajectory,
                        const MixingConfig& config) {
    return transform_trajectory(trajectory, SpectrumWindow::Rectangular,
                                config, /*remove_mean=*/false);
}

SpectrumResult windowed_spectrum(const Trajectory& trajectory,
                                 SpectrumWindow window,
                                 const MixingConfig& config) {
    return transform_trajectory(trajectory, window, config,
                                /*remove_mean=*/false);
}

SpectrumResult detrended_spectrum(const Trajectory& trajectory,
                                  SpectrumWindow window,
                                  const MixingConfig& config) {
    return transform_trajectory(trajectory, window, config,
                                /*remove_mean=*/true);
}

SpectralPeak dominant_peak(const SpectrumResult& result,
                           SpectrumSeries series) {
    if (result.omega.empty()) {
        throw ConfigError("dominant_peak: empty spectrum");
    }
    return dominant_peak_in_band(result, 0.5 * result.bin_width,
                                 result.omega.back(), series);
}

SpectralPeak dominant_peak_in_band(const SpectrumResult& result,
                                   double lo, double hi,
                                   SpectrumSeries series) {
    const auto& values = series_of(result, series);
    SpectralPeak peak;
    bool found = false;
    for (std::size_t i = 0; i < result.omega.size(); ++i) {
        const double w = result.omega[i];
        if (w < lo || w > hi) continue;
        const double a = std::abs(values[i]);
        if (!found || a > peak.amplitude) {
            peak.omega = w;
            peak.amplitude = a;
            found = true;
        }
    }
    if (!found) {
        throw ConfigError("dominant_peak_in_band: no bins in the requested "
                          "band");
    }
    return peak;
}

}  // namespace helimix
