#include "helimix/drive_mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "helimix/errors.hpp"

namespace helimix {

namespace {

// Rotating-wave guard thresholds: beyond these the neglected sidebands are
// no longer small and the reduced model drifts from the exact frames.
constexpr double kXiGuard = 0.7;
constexpr double kRabiToStarkGuard = 0.3;

std::complex<double> unit_phasor(double angle) {
    return {std::cos(angle), std::sin(angle)};
}

void append_guard_warnings(MixingConfig& config) {
    for (std::size_t k = 0; k < config.stark.size(); ++k) {
        const StarkTone& tone = config.stark[k];
        if (std::abs(tone.xi) > kXiGuard) {
            config.warnings.push_back(
                "stark tone " + std::to_string(k + 1) + ": |xi| = " +
                std::to_string(std::abs(tone.xi)) +
                " exceeds 0.7; higher sidebands are not negligible");
        }
        if (std::abs(config.rabi) > kRabiToStarkGuard * tone.omega_g) {
            config.warnings.push_back(
                "thz tone: |coupling| = " + std::to_string(std::abs(config.rabi)) +
                " rad/s exceeds 0.3 * omega_g of stark tone " +
                std::to_string(k + 1) +
                "; rotating-wave frequency hierarchy is weak");
        }
    }
}

// One stationary term kept by the rotating-wave reduction:
//   h12 += coefficient * exp(i (frequency * t + phase)).
struct RotatingTerm {
    double coefficient = 0.0;
    double frequency = 0.0;
    double phase = 0.0;
};

}  // namespace

double MixingConfig::rabi_magnitude() const { return std::abs(rabi); }

double MixingConfig::small_detuning() const {
    if (stark.empty()) {
        throw ConfigError("small_detuning: no Stark tone configured");
    }
    return detuning - stark.front().omega_g;
}

MixingConfig build_mixing(const SurfaceStateModel& model,
                          const std::vector<DriveTone>& tones) {
    const DriveTone* thz = nullptr;
    std::vector<const DriveTone*> stark;
    for (const DriveTone& tone : tones) {
        if (!(tone.amplitude >= 0.0)) {
            throw ConfigError("build_mixing: tone amplitude must be >= 0");
        }
        if (!(tone.angular_frequency > 0.0)) {
            throw ConfigError("build_mixing: tone frequency must be > 0");
        }
        if (tone.role == ToneRole::ThzTransition) {
            if (thz != nullptr) {
                throw ConfigError("build_mixing: exactly one THz tone expected");
            }
            thz = &tone;
        } else {
            stark.push_back(&tone);
        }
    }
    if (thz == nullptr) {
        throw ConfigError("build_mixing: a THz transition tone is required");
    }
    if (stark.empty() || stark.size() > 2) {
        throw ConfigError("build_mixing: one or two Stark tones expected, got " +
                          std::to_string(stark.size()));
    }

    const double q = model.constants.charge;
    const double hbar = model.constants.hbar;
    const double u11 = q * model.dipole(1, 1);
    const double u22 = q * model.dipole(2, 2);
    const double u12 = q * model.dipole(1, 2);

    MixingConfig config;
    config.omega12 = model.transition_angular_frequency();
    config.omega_thz = thz->angular_frequency;
    config.detuning = thz->angular_frequency - config.omega12;
    config.rabi = u12 * thz->amplitude / (2.0 * hbar);
    config.thz_phase = thz->phase;
    config.thz_amplitude = thz->amplitude;

    for (const DriveTone* tone : stark) {
        StarkTone st;
        st.stark11 = u11 * tone->amplitude / (2.0 * hbar);
        st.stark22 = u22 * tone->amplitude / (2.0 * hbar);
        st.omega_g = tone->angular_frequency;
        st.phase = tone->phase;
        st.amplitude = tone->amplitude;
        st.xi = 2.0 * (st.stark11 - st.stark22) / st.omega_g;
        config.stark.push_back(st);
    }

    config.omega_eff = -config.rabi * config.stark.front().xi / 2.0;
    append_guard_warnings(config);
    return config;
}

MixingConfig build_mixing_from_couplings(const SurfaceStateModel& model,
                                         double rabi, double detuning,
                                         double thz_phase,
                                         const std::vector<StarkSetting>& stark) {
    if (stark.empty() || stark.size() > 2) {
        throw ConfigError(
            "build_mixing_from_couplings: one or two Stark tones expected, got " +
            std::to_string(stark.size()));
    }
    const double omega12 = model.transition_angular_frequency();
    if (!(omega12 + detuning > 0.0)) {
        throw ConfigError(
            "build_mixing_from_couplings: detuning places the THz tone at a "
            "non-positive frequency");
    }

    const double q = model.constants.charge;
    const double u11 = q * model.dipole(1, 1);
    const double u22 = q * model.dipole(2, 2);

    MixingConfig config;
    config.omega12 = omega12;
    config.omega_thz = omega12 + detuning;
    config.detuning = detuning;
    config.rabi = rabi;
    config.thz_phase = thz_phase;
    config.thz_amplitude = thz_amplitude_for_rabi(model, rabi);

    for (const StarkSetting& setting : stark) {
        if (!(setting.omega_g > 0.0)) {
            throw ConfigError(
                "build_mixing_from_couplings: Stark frequency must be > 0");
        }
        StarkTone st;
        // Split the requested modulation index between the two level shifts
        // in the physical ratio u11 : u22, so xi = 2 (W110 - W220) / omega_g
        // holds exactly with the requested sign (a sign flip of the field is
        // a pi phase offset and does not change the populations).
        const double scale = setting.xi * setting.omega_g / (2.0 * (u11 - u22));
        st.stark11 = scale * u11;
        st.stark22 = scale * u22;
        st.xi = setting.xi;
        st.omega_g = setting.omega_g;
        st.phase = setting.phase;
        st.amplitude = stark_amplitude_for_xi(model, setting.xi, setting.omega_g);
        config.stark.push_back(st);
    }

    config.omega_eff = -config.rabi * config.stark.front().xi / 2.0;
    append_guard_warnings(config);
    return config;
}

double stark_amplitude_for_xi(const SurfaceStateModel& model, double xi,
                              double omega_g) {
    if (!(omega_g > 0.0)) {
        throw ConfigError("stark_amplitude_for_xi: omega_g must be > 0");
    }
    const double q = model.constants.charge;
    const double u11 = q * model.dipole(1, 1);
    const double u22 = q * model.dipole(2, 2);
    return std::abs(xi) * model.constants.hbar * omega_g / std::abs(u11 - u22);
}

double thz_amplitude_for_rabi(const SurfaceStateModel& model, double rabi) {
    const double u12 = model.constants.charge * model.dipole(1, 2);
    return std::abs(2.0 * model.constants.hbar * rabi / u12);
}

std::complex<double> phase_factor(double t, const MixingConfig& config) {
    double angle = config.thz_phase + config.detuning * t;
    for (const StarkTone& tone : config.stark) {
        angle += tone.xi * std::sin(tone.omega_g * t + tone.phase);
    }
    return unit_phasor(angle);
}

double bessel_j(int n, double x) {
    double sign = 1.0;
    if (n < 0) {
        n = -n;
        if (n % 2 != 0) sign = -sign;
    }
    if (x < 0.0) {
        x = -x;
        if (n % 2 != 0) sign = -sign;
    }
    return sign * std::cyl_bessel_j(static_cast<double>(n), x);
}

std::map<int, double> jacobi_anger_coefficients(double xi, int n_max) {
    if (n_max < 0) {
        throw std::domain_error("jacobi_anger_coefficients: n_max must be >= 0");
    }
    std::map<int, double> coefficients;
    for (int n = -n_max; n <= n_max; ++n) {
        coefficients[n] = bessel_j(n, xi);
    }
    return coefficients;
}

StarkAngles stark_frame_angles(double t, const MixingConfig& config) {
    StarkAngles angles;
    for (const StarkTone& tone : config.stark) {
        const double s = std::sin(tone.omega_g * t + tone.phase);
        angles.theta11 += 2.0 * tone.stark11 / tone.omega_g * s;
        angles.theta22 += 2.0 * tone.stark22 / tone.omega_g * s;
    }
    return angles;
}

std::string frame_name(Frame frame) {
    switch (frame) {
        case Frame::Interaction: return "interaction";
        case Frame::StarkRotated: return "stark";
        case Frame::Rwa: return "rwa";
    }
    throw std::domain_error("frame_name: unknown frame");
}

Frame frame_from_name(const std::string& name) {
    if (name == "interaction") return Frame::Interaction;
    if (name == "stark") return Frame::StarkRotated;
    if (name == "rwa") return Frame::Rwa;
    throw ConfigError("frame_from_name: unknown frame '" + name + "'");
}

std::array<std::complex<double>, 4> Hermitian2::as_matrix() const {
    return {std::complex<double>(h11, 0.0), h12, std::conj(h12),
            std::complex<double>(h22, 0.0)};
}

FrameHamiltonian interaction_frame_hamiltonian(const MixingConfig& config) {
    FrameHamiltonian h;
    h.frame = Frame::Interaction;
    h.description = "interaction frame (explicit diagonal Stark drive)";

    const MixingConfig c = config;
    h.at = [c](double t) {
        Hermitian2 m;
        for (const StarkTone& tone : c.stark) {
            const double osc = std::cos(tone.omega_g * t + tone.phase);
            m.h11 += 2.0 * tone.stark11 * osc;
            m.h22 += 2.0 * tone.stark22 * osc;
        }
        m.h12 = c.rabi * unit_phasor(c.detuning * t + c.thz_phase);
        return m;
    };

    double rate = std::max(std::abs(config.detuning), std::abs(config.rabi));
    bool constant = (config.detuning == 0.0);
    for (const StarkTone& tone : config.stark) {
        const bool silent = tone.stark11 == 0.0 && tone.stark22 == 0.0;
        if (!silent) {
            rate = std::max({rate, tone.omega_g, 2.0 * std::abs(tone.stark11),
                             2.0 * std::abs(tone.stark22)});
            constant = false;
        }
    }
    h.max_frequency = rate;
    h.time_independent = constant;
    return h;
}

FrameHamiltonian stark_frame_hamiltonian(const MixingConfig& config) {
    FrameHamiltonian h;
    h.frame = Frame::StarkRotated;
    h.description = "stark-rotated frame (phase-modulated transition drive)";

    const MixingConfig c = config;
    h.at = [c](double t) {
        Hermitian2 m;
        m.h12 = c.rabi * phase_factor(t, c);
        return m;
    };

    double phase_rate = std::abs(config.detuning);
    for (const StarkTone& tone : config.stark) {
        phase_rate += std::abs(tone.xi) * tone.omega_g;
    }
    h.max_frequency = std::max(phase_rate, std::abs(config.rabi));
    const bool modulated = std::any_of(
        config.stark.begin(), config.stark.end(),
        [](const StarkTone& tone) { return tone.xi != 0.0; });
    h.time_independent =
        config.rabi == 0.0 || (config.detuning == 0.0 && !modulated);
    return h;
}

FrameHamiltonian rwa_hamiltonian(const MixingConfig& config, RwaForm form) {
    const double delta = config.detuning;

    // Candidate sideband per Stark tone: the sign n = -1 or +1 that rotates
    // slowest. The n = -1 branch is the mixer proper (drive supplies one
    // GHz quantum); n = +1 takes over when the THz tone sits below resonance.
    struct Sideband {
        int direction = -1;
        double frequency = 0.0;  // delta + n * omega_g
        double coefficient = 0.0;
        double phase = 0.0;
    };
    std::vector<Sideband> sidebands;
    sidebands.reserve(config.stark.size());
    for (const StarkTone& tone : config.stark) {
        Sideband sb;
        sb.direction = std::abs(delta - tone.omega_g) <= std::abs(delta + tone.omega_g)
                           ? -1
                           : +1;
        sb.frequency = delta + sb.direction * tone.omega_g;
        // Small-xi sideband weight J_{+-1}(xi) ~ +-xi/2 times the carrier
        // coupling.
        sb.coefficient = config.rabi * sb.direction * tone.xi / 2.0;
        sb.phase = config.thz_phase + sb.direction * tone.phase;
        sidebands.push_back(sb);
    }

    bool use_carrier = false;
    switch (form) {
        case RwaForm::Carrier:
            use_carrier = true;
            break;
        case RwaForm::SingleSideband:
            if (config.stark.empty()) {
                throw ConfigError(
                    "rwa_hamiltonian: single-sideband form needs a Stark tone");
            }
            sidebands.resize(1);
            break;
        case RwaForm::TwoSideband:
            if (config.stark.size() != 2) {
                throw ConfigError(
                    "rwa_hamiltonian: two-sideband form needs exactly two "
                    "Stark tones, got " +
                    std::to_string(config.stark.size()));
            }
            break;
        case RwaForm::Auto: {
            // Keep the slowest term with a nonzero coefficient; a silent
            // sideband (xi = 0) cannot dominate anything.
            double slowest_sideband = std::numeric_limits<double>::infinity();
            for (const Sideband& sb : sidebands) {
                if (sb.coefficient != 0.0) {
                    slowest_sideband = std::min(slowest_sideband,
                                                std::abs(sb.frequency));
                }
            }
            use_carrier = std::abs(delta) <= slowest_sideband;
            break;
        }
    }

    std::vector<RotatingTerm> terms;
    std::string description;
    if (use_carrier) {
        terms.push_back({config.rabi, delta, config.thz_phase});
        description = "rotating-wave reduction: carrier term at the THz detuning";
    } else {
        for (const Sideband& sb : sidebands) {
            terms.push_back({sb.coefficient, sb.frequency, sb.phase});
        }
        description = "rotating-wave reduction: " +
                      std::to_string(terms.size()) +
                      " Stark sideband term(s)";
    }

    FrameHamiltonian h;
    h.frame = Frame::Rwa;
    h.description = description;
    h.at = [terms](double t) {
        Hermitian2 m;
        std::complex<double> sum{0.0, 0.0};
        for (const RotatingTerm& term : terms) {
            sum += term.coefficient * unit_phasor(term.frequency * t + term.phase);
        }
        m.h12 = sum;
        return m;
    };

    double rate = 0.0;
    bool constant = true;
    for (const RotatingTerm& term : terms) {
        rate = std::max({rate, std::abs(term.frequency), std::abs(term.coefficient)});
        if (term.frequency != 0.0 && term.coefficient != 0.0) constant = false;
    }
    h.max_frequency = rate;
    h.time_independent = constant;
    return h;
}

}  // namespace helimix
