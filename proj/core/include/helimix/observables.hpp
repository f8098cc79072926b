// observables.hpp — measurable signals derived from a trajectory: the
// vertical dipole, the induced image charge on a pickup electrode, and
// discrete Fourier spectra of the density-matrix components.
//
// Spectra use the convention
//   psi_k = (1/N) sum_n x_n exp(+i omega_k T_n),
// on the dimensionless time T = |Omega_120| t, so a pure cosine of
// amplitude a shows two peaks of height a/2 and the zero-frequency bin
// holds the signal mean. Frequencies are reported in units of |Omega_120|
// on a symmetric (fftshifted) grid.

#pragma once

#include <complex>
#include <string>
#include <vector>

#include "helimix/lindblad.hpp"
#include "helimix/surface_state.hpp"

namespace helimix {

// Electrode geometry for the image-charge readout: N electrons above a
// plate at distance D induce Q = q N (z22 - z11) rho22 / D (relative to the
// ground-state charge). Defaults are a typical sample cell, not a fit.
struct ImageChargeGeometry {
    double electron_count = 1.0e6;
    double plate_separation = 2.0e-3;  // m

    // Throws std::domain_error unless both entries are positive.
    void validate() const;
};

enum class SpectrumWindow { Rectangular, Hann };

std::string window_name(SpectrumWindow window);
SpectrumWindow window_from_name(const std::string& name);

// Which component series of a SpectrumResult to search.
enum class SpectrumSeries { Population, CoherenceReal, CoherenceImag };

// Fourier transforms of (rho22, Re rho12, Im rho12) on a symmetric
// dimensionless frequency grid. bin_width is the frequency resolution
// 2 pi / (N * dT). warnings records sampling concerns (aliasing, missing
// coupling scale) without failing the transform.
struct SpectrumResult {
    std::vector<double> omega;  // ascending, units of |Omega_120|
    std::vector<std::complex<double>> psi22;
    std::vector<std::complex<double>> psi_re12;
    std::vector<std::complex<double>> psi_im12;
    double bin_width = 0.0;
    SpectrumWindow window = SpectrumWindow::Rectangular;
    bool mean_removed = false;
    std::vector<std::string> warnings;
};

struct SpectralPeak {
    double omega = 0.0;
    double amplitude = 0.0;
};

// Vertical dipole expectation <z>(t) in m, reconstructed in the lab frame
// from a Stark-rotated or rotating-wave state:
//   <z> = z11 rho11 + z22 rho22
//         + 2 z12 Re[rho12 exp(i omega12 t) exp(-i sum_k xi_k sin(...))].
// Interaction-frame states carry a different residual rotation and are not
// supported: ConfigError.
double expectation_z(const DensityMatrix& rho, double t, Frame frame,
                     const MixingConfig& config,
                     const SurfaceStateModel& model);

// Image charge in C induced by the excited-state population.
double image_charge(double rho22, const ImageChargeGeometry& geometry,
                    const SurfaceStateModel& model);

// Plain transform of a uniformly sampled trajectory (rectangular window).
// Throws ConfigError for non-uniform grids or fewer than two samples.
SpectrumResult spectrum(const Trajectory& trajectory,
                        const MixingConfig& config);

// Same with an explicit window. The Hann window is compensated by its
// coherent gain (1/2) so on-bin peak amplitudes stay comparable to the
// rectangular case.
SpectrumResult windowed_spectrum(const Trajectory& trajectory,
                                 SpectrumWindow window,
                                 const MixingConfig& config);

// Transform with the signal mean subtracted first: isolates the oscillating
// part when a large static offset would dominate the low bins.
SpectrumResult detrended_spectrum(const Trajectory& trajectory,
                                  SpectrumWindow window,
                                  const MixingConfig& config);

// Largest-magnitude bin at omega > 0, excluding the zero-frequency bin (the
// signal mean is reported there, not a dynamical feature).
SpectralPeak dominant_peak(const SpectrumResult& result,
                           SpectrumSeries series = SpectrumSeries::Population);

// Same restricted to omega in [lo, hi].
SpectralPeak dominant_peak_in_band(
    const SpectrumResult& result, double lo, double hi,
    SpectrumSeries series = SpectrumSeries::Population);

}  // namespace helimix
