// test_observables.cpp — dipole expectation, image-charge readout, and the
// discrete Fourier spectra with their window functions.

#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "approx.hpp"
#include "helimix/constants.hpp"
#include "helimix/drive_mixing.hpp"
#include "helimix/errors.hpp"
#include "helimix/lindblad.hpp"
#include "helimix/observables.hpp"
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

using Signal = std::function<double(double)>;

// Synthetic uniformly sampled trajectory; the population trace carries the
// test signal, coherences are optional.
Trajectory make_traj(int n, double dt, const Signal& pop,
                     const Signal& re12 = nullptr, const Signal& im12 = nullptr,
                     double max_drive = 1e9) {
    Trajectory traj;
    traj.frame = Frame::Rwa;
    traj.max_drive_frequency = max_drive;
    traj.times.resize(n);
    traj.states.resize(n);
    for (int i = 0; i < n; ++i) {
        const double t = i * dt;
        traj.times[i] = t;
        const double p = pop(t);
        traj.states[i].rho11 = 1.0 - p;
        traj.states[i].rho22 = p;
        traj.states[i].rho12 = {re12 ? re12(t) : 0.0, im12 ? im12(t) : 0.0};
    }
    return traj;
}

constexpr int kN = 256;
constexpr double kDt = 1e-9;            // s; dimensionless step dT = 0.1
constexpr double kDimlessStep = 0.1;    // |Omega_120| * dt with rabi = 1e8
const double kBin = 2.0 * kPi / (kN * kDimlessStep);

// Cosine that lands exactly on DFT bin k.
Signal on_bin_cosine(double mean, double amplitude, double k) {
    const double omega = k * kBin;
    return [mean, amplitude, omega](double t) {
        return mean + amplitude * std::cos(omega * 1e8 * t);
    };
}

}  // namespace

TEST_CASE("window names round-trip") {
    CHECK(window_name(SpectrumWindow::Rectangular) == "rectangular");
    CHECK(window_name(SpectrumWindow::Hann) == "hann");
    CHECK(window_from_name("rectangular") == SpectrumWindow::Rectangular);
    CHECK(window_from_name("hann") == SpectrumWindow::Hann);
    CHECK_THROWS_AS((void)window_from_name("hamming"), ConfigError);
}

TEST_CASE("a pure on-bin cosine transforms to two half-amplitude lines") {
    const Trajectory traj = make_traj(kN, kDt, on_bin_cosine(0.3, 0.2, 16.0));
    const SpectrumResult spec = spectrum(traj, base_config());

    REQUIRE(spec.omega.size() == kN);
    CHECK(spec.bin_width == rel(kBin, 1e-12));
    CHECK(spec.window == SpectrumWindow::Rectangular);
    CHECK_FALSE(spec.mean_removed);
    CHECK(spec.warnings.empty());

    // Symmetric ascending grid with the zero bin in the middle.
    CHECK(spec.omega[kN / 2] == 0.0);
    CHECK(spec.omega.front() == rel(-(kN / 2) * kBin, 1e-12));
    for (std::size_t i = 1; i < spec.omega.size(); ++i) {
        CHECK(spec.omega[i] > spec.omega[i - 1]);
    }

    // Mean in the zero bin, a/2 at +/- the signal frequency.
    const int dc = kN / 2;
    const int up = dc + 16;
    const int down = dc - 16;
    CHECK(std::abs(spec.psi22[dc] - 0.3) < 1e-12);
    CHECK(spec.omega[up] == rel(16.0 * kBin, 1e-12));
    CHECK(spec.psi22[up].real() == rel(0.1, 1e-9));
    CHECK(std::abs(spec.psi22[up].imag()) < 1e-12);
    CHECK(std::abs(spec.psi22[down]) == rel(0.1, 1e-9));

    // Independent brute-force DFT cross-check on a few bins.
    for (int k : {down, dc, up, dc + 2}) {
        std::complex<double> sum{0.0, 0.0};
        for (int n = 0; n < kN; ++n) {
            const double t_dimless = n * kDimlessStep;
            sum += traj.states[n].rho22 *
                   std::exp(std::complex<double>(0.0, spec.omega[k] * t_dimless));
        }
        sum /= static_cast<double>(kN);
        CHECK(std::abs(sum - spec.psi22[k]) < 1e-12);
    }

    const SpectralPeak peak = dominant_peak(spec);
    CHECK(peak.omega == rel(16.0 * kBin, 1e-12));
    CHECK(peak.amplitude == rel(0.1, 1e-9));
}

TEST_CASE("Hann window: compensated gain, 3-bin kernel, mean leakage") {
    const Trajectory traj = make_traj(kN, kDt, on_bin_cosine(0.3, 0.2, 16.0));
    const int dc = kN / 2;
    const int up = dc + 16;

    // With the mean removed the Hann kernel is exactly three bins wide and
    // the compensated on-bin peak keeps its rectangular amplitude.
    const SpectrumResult det =
        detrended_spectrum(traj, SpectrumWindow::Hann, base_config());
    CHECK(det.mean_removed);
    CHECK(det.window == SpectrumWindow::Hann);
    CHECK(std::abs(det.psi22[dc]) < 1e-12);
    CHECK(std::abs(det.psi22[up]) == rel(0.1, 1e-9));
    CHECK(std::abs(det.psi22[up + 1]) == rel(0.05, 1e-8));
    CHECK(std::abs(det.psi22[up - 1]) == rel(0.05, 1e-8));
    CHECK(std::abs(det.psi22[up + 2]) < 1e-12);
    CHECK(std::abs(det.psi22[dc + 1]) < 1e-12);

    // Without detrending the window smears the mean into the bins next to
    // zero frequency — which is why the run pipeline also writes detrended
    // peaks.
    const SpectrumResult raw =
        windowed_spectrum(traj, SpectrumWindow::Hann, base_config());
    CHECK(std::abs(raw.psi22[dc] - 0.3) < 1e-12);
    CHECK(std::abs(raw.psi22[dc + 1]) == rel(0.15, 1e-9));
    const SpectralPeak leak = dominant_peak(raw);
    CHECK(leak.omega == rel(kBin, 1e-12));
    CHECK(leak.amplitude == rel(0.15, 1e-9));
}

TEST_CASE("off-bin tones: scalloping loss and sidelobe suppression") {
    const Trajectory traj = make_traj(kN, kDt, on_bin_cosine(0.0, 0.2, 16.5));
    const double omega_half = 16.5 * kBin;

    const SpectrumResult rect =
        windowed_spectrum(traj, SpectrumWindow::Rectangular, base_config());
    const SpectrumResult hann =
        windowed_spectrum(traj, SpectrumWindow::Hann, base_config());

    const SpectralPeak rect_peak = dominant_peak_in_band(
        rect, omega_half - 2.0 * kBin, omega_half + 2.0 * kBin);
    const SpectralPeak hann_peak = dominant_peak_in_band(
        hann, omega_half - 2.0 * kBin, omega_half + 2.0 * kBin);

    CHECK(std::abs(rect_peak.omega - omega_half) < 0.51 * kBin);
    CHECK(std::abs(hann_peak.omega - omega_half) < 0.51 * kBin);
    // Worst-case scalloping: ~64% of a/2 for rectangular, ~85% for Hann.
    CHECK(rect_peak.amplitude > 0.055);
    CHECK(rect_peak.amplitude < 0.075);
    CHECK(hann_peak.amplitude > 0.080);
    CHECK(hann_peak.amplitude < 0.092);
    CHECK(hann_peak.amplitude > rect_peak.amplitude);

    // 16.5 bins above the tone the rectangular leakage is still visible
    // while the Hann sidelobes are far down.
    const int far = kN / 2 + 33;
    const double rect_leak = std::abs(rect.psi22[far]);
    const double hann_leak = std::abs(hann.psi22[far]);
    CHECK(rect_leak > 1e-3);
    CHECK(hann_leak < 0.1 * rect_leak);
}

TEST_CASE("detrending removes only the zero-frequency content") {
    const Trajectory traj = make_traj(kN, kDt, on_bin_cosine(0.3, 0.2, 16.0));
    const SpectrumResult det =
        detrended_spectrum(traj, SpectrumWindow::Rectangular, base_config());
    CHECK(det.mean_removed);
    CHECK(std::abs(det.psi22[kN / 2]) < 1e-12);
    CHECK(std::abs(det.psi22[kN / 2 + 16]) == rel(0.1, 1e-9));
}

TEST_CASE("grid validation and sampling warnings") {
    Trajectory traj = make_traj(kN, kDt, on_bin_cosine(0.3, 0.2, 16.0));

    SUBCASE("non-uniform grids are rejected") {
        traj.times[100] += 1e-5 * kDt;
        CHECK_THROWS_AS((void)spectrum(traj, base_config()), ConfigError);
    }

    SUBCASE("fewer than two samples is not a spectrum") {
        traj.times.resize(1);
        traj.states.resize(1);
        CHECK_THROWS_AS((void)spectrum(traj, base_config()), ConfigError);
    }

    SUBCASE("zero coupling falls back to an absolute frequency axis") {
        const MixingConfig uncoupled = build_mixing_from_couplings(
            model(), 0.0, 1e9, 0.0, {{0.5, 1e9, 0.0}});
        const SpectrumResult spec = spectrum(traj, uncoupled);
        REQUIRE(!spec.warnings.empty());
        bool mentions_units = false;
        for (const std::string& w : spec.warnings) {
            if (w.find("rad/s") != std::string::npos) mentions_units = true;
        }
        CHECK(mentions_units);
        CHECK(spec.bin_width == rel(2.0 * kPi / (kN * kDt), 1e-12));
    }

    SUBCASE("undersampled drives trigger an aliasing warning") {
        traj.max_drive_frequency = 1e10;  // Nyquist is pi/dt ~ 3.1e9
        const SpectrumResult spec = spectrum(traj, base_config());
        bool mentions_alias = false;
        for (const std::string& w : spec.warnings) {
            if (w.find("alias") != std::string::npos) mentions_alias = true;
        }
        CHECK(mentions_alias);
    }
}

TEST_CASE("band-limited peak search and component selection") {
    // Strong line on bin 8, weak line on bin 32 (population); coherence
    // components carry their own lines.
    const double omega_a = 8.0 * kBin;
    const double omega_b = 24.0 * kBin;
    const double omega_c = 40.0 * kBin;
    const Trajectory traj = make_traj(
        kN, kDt, on_bin_cosine(0.5, 0.2, 8.0),
        [&](double t) { return 0.1 * std::cos(omega_b * 1e8 * t); },
        [&](double t) { return 0.1 * std::cos(omega_c * 1e8 * t); });
    Trajectory two_tone = traj;
    for (int i = 0; i < kN; ++i) {
        const double t = i * kDt;
        two_tone.states[i].rho22 += 0.05 * std::cos(32.0 * kBin * 1e8 * t);
        two_tone.states[i].rho11 = 1.0 - two_tone.states[i].rho22;
    }

    const SpectrumResult spec = spectrum(two_tone, base_config());
    CHECK(dominant_peak(spec).omega == rel(omega_a, 1e-12));
    const SpectralPeak second = dominant_peak_in_band(
        spec, 32.0 * kBin - kBin, 32.0 * kBin + kBin);
    CHECK(second.omega == rel(32.0 * kBin, 1e-12));
    CHECK(second.amplitude == rel(0.025, 1e-8));

    CHECK(dominant_peak(spec, SpectrumSeries::CoherenceReal).omega ==
          rel(omega_b, 1e-12));
    CHECK(dominant_peak(spec, SpectrumSeries::CoherenceImag).omega ==
          rel(omega_c, 1e-12));
    CHECK(std::abs(spec.psi_re12[kN / 2 + 24]) == rel(0.05, 1e-9));
    CHECK(std::abs(spec.psi_im12[kN / 2 + 40]) == rel(0.05, 1e-9));

    CHECK_THROWS_AS(
        (void)dominant_peak_in_band(spec, spec.omega.back() + kBin,
                                    spec.omega.back() + 2.0 * kBin),
        ConfigError);
    CHECK_THROWS_AS((void)dominant_peak_in_band(spec, 5.0, 2.0), ConfigError);
}

TEST_CASE("lab-frame dipole expectation") {
    const MixingConfig c = base_config();
    const double z11 = model().dipole(1, 1);
    const double z22 = model().dipole(2, 2);
    const double z12 = model().dipole(1, 2);

    const DensityMatrix rho{0.5, 0.5, {0.1, 0.0}};

    // At t = 0 every rotation angle vanishes.
    CHECK(expectation_z(rho, 0.0, Frame::StarkRotated, c, model()) ==
          rel(0.5 * z11 + 0.5 * z22 + 0.2 * z12, 1e-12));

    // At finite t the coherence term rotates at the transition frequency
    // corrected by the drive modulation.
    const double t = 2.3e-12;
    const std::complex<double> rotor =
        std::exp(std::complex<double>(0.0, c.omega12 * t)) *
        std::exp(std::complex<double>(0.0, -0.5 * std::sin(1e9 * t)));
    const double expected =
        0.5 * z11 + 0.5 * z22 + 2.0 * z12 * (rho.rho12 * rotor).real();
    CHECK(expectation_z(rho, t, Frame::StarkRotated, c, model()) ==
          rel(expected, 1e-12));

    // Ground state: static dipole of level 1, any time.
    CHECK(expectation_z(ground_state(), 1e-9, Frame::Rwa, c, model()) ==
          rel(z11, 1e-12));

    CHECK_THROWS_AS(
        (void)expectation_z(rho, 0.0, Frame::Interaction, c, model()),
        ConfigError);
}

TEST_CASE("image charge induced on the pickup plate") {
    // Pin the Bohr radius to 76 Angstrom to match a frozen reference value.
    PhysicalConstants constants;
    constants.epsilon =
        epsilon_for_image_strength(image_strength_for_bohr_radius(76.0e-10,
                                                                  constants));
    const SurfaceStateModel pinned = build_surface_model(constants);

    const ImageChargeGeometry geometry{};  // 1e6 electrons, 2 mm plate
    CHECK(image_charge(0.5, geometry, pinned) == rel(1.36986102207e-18, 1e-9));

    CHECK(image_charge(1.0, geometry, pinned) ==
          rel(2.0 * image_charge(0.5, geometry, pinned), 1e-14));
    CHECK(image_charge(0.0, geometry, pinned) == 0.0);
    CHECK_NOTHROW((void)image_charge(-1e-10, geometry, pinned));

    CHECK_THROWS_AS((void)image_charge(1.5, geometry, pinned),
                    std::domain_error);
    CHECK_THROWS_AS((void)image_charge(-0.5, geometry, pinned),
                    std::domain_error);

    ImageChargeGeometry bad;
    bad.plate_separation = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
    CHECK_THROWS_AS((void)image_charge(0.5, bad, pinned), std::domain_error);
    bad = ImageChargeGeometry{};
    bad.electron_count = -5.0;
    CHECK_THROWS_AS((void)image_charge(0.5, bad, pinned), std::domain_error);
}
