#include "helimix/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "helimix/errors.hpp"
#include "helimix/version.hpp"

namespace helimix {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// unit handling
//
// User-facing keys carry explicit unit suffixes. With "angular": true (the
// default) the _ghz/_thz values are angular rates in 1e9/1e12 rad/s, matching
// how drive parameters are usually quoted against each other (e.g. a coupling
// of 0.1 omega_g). With "angular": false they are ordinary frequencies and
// pick up a factor 2 pi. Decay rates are always plain 1/s scaled from MHz.

struct UnitScale {
    bool angular = true;
    double ghz() const { return angular ? 1e9 : 2.0 * kPi * 1e9; }
    double thz() const { return angular ? 1e12 : 2.0 * kPi * 1e12; }
};

double require_number(const json& j, const std::string& where) {
    if (!j.is_number()) {
        throw ConfigError("scenario: " + where + " must be a number");
    }
    return j.get<double>();
}

void reject_unknown_keys(const json& j, const std::string& where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed) {
            if (item.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError("scenario: unknown key '" + item.key() +
                              "' in " + where);
        }
    }
}

ThzSpec parse_thz(const json& j, const UnitScale& units) {
    reject_unknown_keys(j, "drive.thz",
                        {"rabi_ghz", "detuning_ghz", "amplitude_v_per_m",
                         "frequency_thz", "phase_rad"});
    ThzSpec spec;
    if (j.contains("rabi_ghz")) {
        spec.rabi = require_number(j["rabi_ghz"], "drive.thz.rabi_ghz") *
                    units.ghz();
    }
    if (j.contains("detuning_ghz")) {
        spec.detuning =
            require_number(j["detuning_ghz"], "drive.thz.detuning_ghz") *
            units.ghz();
    }
    if (j.contains("amplitude_v_per_m")) {
        spec.amplitude = require_number(j["amplitude_v_per_m"],
                                        "drive.thz.amplitude_v_per_m");
    }
    if (j.contains("frequency_thz")) {
        spec.frequency =
            require_number(j["frequency_thz"], "drive.thz.frequency_thz") *
            units.thz();
    }
    if (j.contains("phase_rad")) {
        spec.phase = require_number(j["phase_rad"], "drive.thz.phase_rad");
    }
    return spec;
}

StarkSpec parse_stark(const json& j, std::size_t index,
                      const UnitScale& units) {
    const std::string where = "drive.stark[" + std::to_string(index) + "]";
    reject_unknown_keys(
        j, where, {"xi", "amplitude_v_per_m", "frequency_ghz", "phase_rad"});
    StarkSpec spec;
    if (j.contains("xi")) {
        spec.xi = require_number(j["xi"], where + ".xi");
    }
    if (j.contains("amplitude_v_per_m")) {
        spec.amplitude =
            require_number(j["amplitude_v_per_m"], where + ".amplitude_v_per_m");
    }
    if (!j.contains("frequency_ghz")) {
        throw ConfigError("scenario: " + where + " needs frequency_ghz");
    }
    spec.frequency =
        require_number(j["frequency_ghz"], where + ".frequency_ghz") *
        units.ghz();
    if (j.contains("phase_rad")) {
        spec.phase = require_number(j["phase_rad"], where + ".phase_rad");
    }
    return spec;
}

// ---------------------------------------------------------------------------
// deterministic text formatting

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() +
                                 "' for writing");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("short write to '" + path.string() + "'");
    }
}

std::string trajectory_csv(const Trajectory& traj, double time_scale) {
    std::string text = "t,T,rho22,Re_rho12,Im_rho12\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        const DensityMatrix& s = traj.states[i];
        text += format_full(t);
        text += ',';
        text += format_full(time_scale * t);
        text += ',';
        text += format_full(s.rho22);
        text += ',';
        text += format_full(s.rho12.real());
        text += ',';
        text += format_full(s.rho12.imag());
        text += '\n';
    }
    return text;
}

std::string spectrum_csv(const SpectrumResult& s) {
    std::string text = "omega,abs_psi22,arg_psi22,abs_psiR12,abs_psiI12\n";
    for (std::size_t i = 0; i < s.omega.size(); ++i) {
        text += format_full(s.omega[i]);
        text += ',';
        text += format_full(std::abs(s.psi22[i]));
        text += ',';
        text += format_full(std::arg(s.psi22[i]));
        text += ',';
        text += format_full(std::abs(s.psi_re12[i]));
        text += ',';
        text += format_full(std::abs(s.psi_im12[i]));
        text += '\n';
    }
    return text;
}

json peak_to_json(const SpectrumResult& s) {
    json out;
    for (const auto& [label, series] :
         {std::pair{"psi22", SpectrumSeries::Population},
          std::pair{"psi_re12", SpectrumSeries::CoherenceReal},
          std::pair{"psi_im12", SpectrumSeries::CoherenceImag}}) {
        const SpectralPeak peak = dominant_peak(s, series);
        out[label] = {{"omega", peak.omega}, {"amplitude", peak.amplitude}};
    }
    return out;
}

json state_to_json(const DensityMatrix& rho) {
    return {{"rho22", rho.rho22},
            {"re_rho12", rho.rho12.real()},
            {"im_rho12", rho.rho12.imag()}};
}

FrameHamiltonian hamiltonian_for(Frame frame, const MixingConfig& mixing) {
    switch (frame) {
        case Frame::Interaction: return interaction_frame_hamiltonian(mixing);
        case Frame::StarkRotated: return stark_frame_hamiltonian(mixing);
        case Frame::Rwa: return rwa_hamiltonian(mixing);
    }
    throw std::domain_error("hamiltonian_for: unknown frame");
}

// Inter-frame coherence map: the Stark rotation multiplies rho12 of the
// interaction frame by exp(i sum_k xi_k sin(omega_k t + theta_k)); the
// rotating-wave frame shares the Stark frame's phases.
std::complex<double> to_stark_coherence(Frame frame,
                                        const std::complex<double>& rho12,
                                        double t, const MixingConfig& mixing) {
    if (frame != Frame::Interaction) return rho12;
    double angle = 0.0;
    for (const StarkTone& tone : mixing.stark) {
        angle += tone.xi * std::sin(tone.omega_g * t + tone.phase);
    }
    return rho12 * std::complex<double>(std::cos(angle), std::sin(angle));
}

json config_echo(const ScenarioConfig& c);

}  // namespace

// ---------------------------------------------------------------------------
// parsing

ScenarioConfig parse_scenario_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("scenario: top level must be a JSON object");
    }
    reject_unknown_keys(j, "scenario",
                        {"name", "description", "angular", "model", "drive",
                         "decoherence", "initial_state", "frames", "time",
                         "spectrum", "geometry", "report_steady_state"});

    UnitScale units;
    if (j.contains("angular")) {
        if (!j["angular"].is_boolean()) {
            throw ConfigError("scenario: angular must be a boolean");
        }
        units.angular = j["angular"].get<bool>();
    }

    ScenarioConfig config;
    if (j.contains("name")) config.name = j["name"].get<std::string>();
    if (j.contains("description"))
        config.description = j["description"].get<std::string>();

    if (j.contains("model")) {
        const json& m = j["model"];
        reject_unknown_keys(m, "model",
                            {"epsilon", "lambda", "bohr_radius_angstrom"});
        if (m.contains("epsilon"))
            config.epsilon = require_number(m["epsilon"], "model.epsilon");
        if (m.contains("lambda"))
            config.lambda = require_number(m["lambda"], "model.lambda");
        if (m.contains("bohr_radius_angstrom"))
            config.bohr_radius = require_number(m["bohr_radius_angstrom"],
                                                "model.bohr_radius_angstrom") *
                                 1e-10;
    }

    if (!j.contains("drive") || !j["drive"].is_object()) {
        throw ConfigError("scenario: a drive section is required");
    }
    const json& drive = j["drive"];
    reject_unknown_keys(drive, "drive", {"thz", "stark"});
    if (!drive.contains("thz")) {
        throw ConfigError("scenario: drive.thz is required");
    }
    config.thz = parse_thz(drive["thz"], units);
    if (!drive.contains("stark") || !drive["stark"].is_array()) {
        throw ConfigError("scenario: drive.stark must be an array of tones");
    }
    std::size_t index = 0;
    for (const json& tone : drive["stark"]) {
        config.stark.push_back(parse_stark(tone, index++, units));
    }

    if (j.contains("decoherence")) {
        const json& d = j["decoherence"];
        reject_unknown_keys(d, "decoherence",
                            {"decay_mhz", "dephasing1_mhz", "dephasing2_mhz"});
        if (d.contains("decay_mhz"))
            config.rates.decay =
                require_number(d["decay_mhz"], "decoherence.decay_mhz") * 1e6;
        if (d.contains("dephasing1_mhz"))
            config.rates.dephasing1 =
                require_number(d["dephasing1_mhz"],
                               "decoherence.dephasing1_mhz") *
                1e6;
        if (d.contains("dephasing2_mhz"))
            config.rates.dephasing2 =
                require_number(d["dephasing2_mhz"],
                               "decoherence.dephasing2_mhz") *
                1e6;
    }

    if (j.contains("initial_state")) {
        const json& s = j["initial_state"];
        reject_unknown_keys(s, "initial_state",
                            {"rho22", "re_rho12", "im_rho12"});
        double rho22 = 0.0, re = 0.0, im = 0.0;
        if (s.contains("rho22"))
            rho22 = require_number(s["rho22"], "initial_state.rho22");
        if (s.contains("re_rho12"))
            re = require_number(s["re_rho12"], "initial_state.re_rho12");
        if (s.contains("im_rho12"))
            im = require_number(s["im_rho12"], "initial_state.im_rho12");
        config.initial_state.rho22 = rho22;
        config.initial_state.rho11 = 1.0 - rho22;
        config.initial_state.rho12 = {re, im};
    }

    if (j.contains("frames")) {
        if (!j["frames"].is_array() || j["frames"].empty()) {
            throw ConfigError("scenario: frames must be a non-empty array");
        }
        config.frames.clear();
        for (const json& f : j["frames"]) {
            const Frame frame = frame_from_name(f.get<std::string>());
            for (Frame existing : config.frames) {
                if (existing == frame) {
                    throw ConfigError("scenario: frame '" + frame_name(frame) +
                                      "' listed twice");
                }
            }
            config.frames.push_back(frame);
        }
    }

    if (j.contains("time")) {
        const json& t = j["time"];
        reject_unknown_keys(t, "time", {"t_end_ns", "samples"});
        if (t.contains("t_end_ns"))
            config.time.t_end =
                require_number(t["t_end_ns"], "time.t_end_ns") * 1e-9;
        if (t.contains("samples")) {
            if (!t["samples"].is_number_integer()) {
                throw ConfigError("scenario: time.samples must be an integer");
            }
            config.time.samples = t["samples"].get<long long>();
        }
    }

    if (j.contains("spectrum")) {
        const json& s = j["spectrum"];
        reject_unknown_keys(s, "spectrum", {"enabled", "window"});
        if (s.contains("enabled")) {
            if (!s["enabled"].is_boolean()) {
                throw ConfigError("scenario: spectrum.enabled must be a "
                                  "boolean");
            }
            config.spectrum.enabled = s["enabled"].get<bool>();
        }
        if (s.contains("window"))
            config.spectrum.window =
                window_from_name(s["window"].get<std::string>());
    }

    if (j.contains("geometry")) {
        const json& g = j["geometry"];
        reject_unknown_keys(g, "geometry",
                            {"electron_count", "plate_separation_mm"});
        if (g.contains("electron_count"))
            config.geometry.electron_count =
                require_number(g["electron_count"], "geometry.electron_count");
        if (g.contains("plate_separation_mm"))
            config.geometry.plate_separation =
                require_number(g["plate_separation_mm"],
                               "geometry.plate_separation_mm") *
                1e-3;
    }

    if (j.contains("report_steady_state")) {
        if (!j["report_steady_state"].is_boolean()) {
            throw ConfigError(
                "scenario: report_steady_state must be a boolean");
        }
        config.report_steady_state = j["report_steady_state"].get<bool>();
    }

    return config;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("scenario: cannot read '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario_text(text.str());
}

// ---------------------------------------------------------------------------
// canonical echo + hash

namespace {

// Canonical echo uses the same schema the parser accepts (angular units), so
// the config block of a manifest can be saved and re-run as-is.
json config_echo(const ScenarioConfig& c) {
    json thz;
    if (c.thz.rabi) thz["rabi_ghz"] = *c.thz.rabi / 1e9;
    if (c.thz.detuning) thz["detuning_ghz"] = *c.thz.detuning / 1e9;
    if (c.thz.amplitude) thz["amplitude_v_per_m"] = *c.thz.amplitude;
    if (c.thz.frequency) thz["frequency_thz"] = *c.thz.frequency / 1e12;
    thz["phase_rad"] = c.thz.phase;

    json stark = json::array();
    for (const StarkSpec& tone : c.stark) {
        json t;
        if (tone.xi) t["xi"] = *tone.xi;
        if (tone.amplitude) t["amplitude_v_per_m"] = *tone.amplitude;
        t["frequency_ghz"] = tone.frequency / 1e9;
        t["phase_rad"] = tone.phase;
        stark.push_back(t);
    }

    json frames = json::array();
    for (Frame f : c.frames) frames.push_back(frame_name(f));

    json model;
    if (c.epsilon) model["epsilon"] = *c.epsilon;
    if (c.lambda) model["lambda"] = *c.lambda;
    if (c.bohr_radius) model["bohr_radius_angstrom"] = *c.bohr_radius * 1e10;

    json time;
    if (c.time.t_end) time["t_end_ns"] = *c.time.t_end * 1e9;
    if (c.time.samples) time["samples"] = *c.time.samples;

    json out{
        {"name", c.name},
        {"description", c.description},
        {"angular", true},
        {"model", model},
        {"drive", {{"thz", thz}, {"stark", stark}}},
        {"decoherence",
         {{"decay_mhz", c.rates.decay / 1e6},
          {"dephasing1_mhz", c.rates.dephasing1 / 1e6},
          {"dephasing2_mhz", c.rates.dephasing2 / 1e6}}},
        {"initial_state", state_to_json(c.initial_state)},
        {"frames", frames},
        {"time", time},
        {"spectrum",
         {{"enabled", c.spectrum.enabled},
          {"window", window_name(c.spectrum.window)}}},
        {"geometry",
         {{"electron_count", c.geometry.electron_count},
          {"plate_separation_mm", c.geometry.plate_separation * 1e3}}},
        {"report_steady_state", c.report_steady_state},
    };
    return out;
}

}  // namespace

std::string scenario_to_json(const ScenarioConfig& config) {
    return config_echo(config).dump(2);
}

std::string config_hash(const ScenarioConfig& config) {
    const std::string text = scenario_to_json(config);
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64-bit offset basis
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;  // FNV prime
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// built-in catalog
//
// All captions quote couplings against the GHz tone: xi = 0.5, a transition
// coupling of 0.1 omega_g, matched THz detuning, 10 MHz decay and 5 MHz
// dephasing per level unless stated otherwise.

namespace {

constexpr double kGhz = 1e9;  // rad/s

ScenarioConfig two_wave_base() {
    ScenarioConfig c;
    c.thz.rabi = 0.1 * kGhz;
    c.thz.detuning = kGhz;
    c.stark = {StarkSpec{.xi = 0.5, .amplitude = {}, .frequency = kGhz,
                         .phase = 0.0}};
    c.rates = DecoherenceRates{.decay = 1e7, .dephasing1 = 5e6,
                               .dephasing2 = 5e6};
    // Five periods of the slow population oscillation at 2 |omega_eff|
    // = 5e7 rad/s.
    c.time.t_end = 5.0 * 2.0 * kPi / 5.0e7;
    return c;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> builtin_scenario_catalog() {
    return {
        {"fig1",
         "two-wave mixing at matched detuning, all three frames (spectrum "
         "shows the effective drive at omega = 0.5 and GHz remnants near "
         "10)"},
        {"fig2",
         "two-wave mixing, exact Stark frame vs rotating-wave reduction"},
        {"fig2-ghz-only",
         "GHz Stark tone alone: no transition drive, the population stays "
         "in the ground state"},
        {"fig2-thz-only",
         "detuned THz tone alone: fast small-amplitude detuned oscillation"},
        {"fig3",
         "three-wave mixing: two GHz tones at 0.9 and 1.1 GHz bracketing "
         "the matched point"},
        {"rwa-vs-exact",
         "short two-wave run in all three frames for quick agreement "
         "checks"},
        {"steady-state",
         "long rotating-wave run converging to the driven-dissipative fixed "
         "point, with a steady-state report"},
    };
}

std::vector<std::string> builtin_scenario_names() {
    std::vector<std::string> names;
    for (const auto& [name, blurb] : builtin_scenario_catalog()) {
        names.push_back(name);
    }
    return names;
}

ScenarioConfig builtin_scenario(const std::string& name) {
    ScenarioConfig c;
    if (name == "fig1") {
        c = two_wave_base();
        c.frames = {Frame::Interaction, Frame::StarkRotated, Frame::Rwa};
    } else if (name == "fig2") {
        c = two_wave_base();
        c.frames = {Frame::StarkRotated, Frame::Rwa};
    } else if (name == "fig2-ghz-only") {
        c = two_wave_base();
        c.thz.rabi = 0.0;
        c.frames = {Frame::StarkRotated};
    } else if (name == "fig2-thz-only") {
        c = two_wave_base();
        c.stark.front().xi = 0.0;
        c.frames = {Frame::StarkRotated, Frame::Rwa};
    } else if (name == "fig3") {
        c = two_wave_base();
        c.stark = {
            StarkSpec{.xi = 0.5, .amplitude = {}, .frequency = 0.9 * kGhz,
                      .phase = 0.0},
            StarkSpec{.xi = 0.5, .amplitude = {}, .frequency = 1.1 * kGhz,
                      .phase = 0.0},
        };
        c.frames = {Frame::StarkRotated, Frame::Rwa};
        // Five population decay times.
        c.time.t_end = 5.0e-7;
    } else if (name == "rwa-vs-exact") {
        c = two_wave_base();
        c.frames = {Frame::Interaction, Frame::StarkRotated, Frame::Rwa};
        c.time.t_end = 2.0 * 2.0 * kPi / 5.0e7;
    } else if (name == "steady-state") {
        c = two_wave_base();
        c.frames = {Frame::Rwa};
        c.time.t_end = 1.0e-6;  // ten decay times
        c.report_steady_state = true;
    } else {
        throw ConfigError("builtin_scenario: unknown scenario '" + name +
                          "'; see list-scenarios");
    }
    c.name = name;
    for (const auto& [catalog_name, blurb] : builtin_scenario_catalog()) {
        if (catalog_name == name) c.description = blurb;
    }
    return c;
}

// ---------------------------------------------------------------------------
// resolution

ResolvedScenario resolve(const ScenarioConfig& config) {
    // Model: at most one way to pin the bound-state scale.
    int overrides = 0;
    overrides += config.epsilon.has_value();
    overrides += config.lambda.has_value();
    overrides += config.bohr_radius.has_value();
    if (overrides > 1) {
        throw ConfigError(
            "scenario: model accepts only one of epsilon, lambda, "
            "bohr_radius");
    }
    PhysicalConstants constants;
    try {
        if (config.epsilon) {
            constants.epsilon = *config.epsilon;
        } else if (config.lambda) {
            constants.epsilon = epsilon_for_image_strength(*config.lambda);
        } else if (config.bohr_radius) {
            constants.epsilon = epsilon_for_image_strength(
                image_strength_for_bohr_radius(*config.bohr_radius,
                                               constants));
        }
        constants.validate();
    } catch (const std::domain_error& e) {
        throw ConfigError(std::string("scenario: model: ") + e.what());
    }

    ResolvedScenario rs;
    rs.config = config;
    rs.model = build_surface_model(constants);

    const double q = constants.charge;
    const double hbar = constants.hbar;
    const double u11 = q * rs.model.dipole(1, 1);
    const double u22 = q * rs.model.dipole(2, 2);
    const double u12 = q * rs.model.dipole(1, 2);
    const double omega12 = rs.model.transition_angular_frequency();

    // THz tone: coupling-first or amplitude-first.
    double rabi = 0.0;
    double detuning = 0.0;
    if (config.thz.rabi && config.thz.amplitude) {
        throw ConfigError(
            "scenario: drive.thz: give rabi or amplitude, not both");
    }
    if (config.thz.rabi) {
        if (config.thz.frequency) {
            throw ConfigError(
                "scenario: drive.thz: with rabi, use detuning (not an "
                "absolute frequency)");
        }
        rabi = *config.thz.rabi;
        detuning = config.thz.detuning.value_or(0.0);
    } else if (config.thz.amplitude) {
        if (!config.thz.frequency) {
            throw ConfigError(
                "scenario: drive.thz: amplitude needs frequency_thz");
        }
        if (config.thz.detuning) {
            throw ConfigError(
                "scenario: drive.thz: give detuning or an absolute "
                "frequency, not both");
        }
        if (*config.thz.amplitude < 0.0) {
            throw ConfigError("scenario: drive.thz: amplitude must be >= 0");
        }
        rabi = u12 * *config.thz.amplitude / (2.0 * hbar);
        detuning = *config.thz.frequency - omega12;
    } else {
        throw ConfigError(
            "scenario: drive.thz needs a coupling (rabi) or a field "
            "amplitude");
    }

    // Stark tones, canonicalized to modulation indices.
    std::vector<StarkSetting> settings;
    for (std::size_t k = 0; k < config.stark.size(); ++k) {
        const StarkSpec& tone = config.stark[k];
        const std::string where = "drive.stark[" + std::to_string(k) + "]";
        if (tone.xi && tone.amplitude) {
            throw ConfigError("scenario: " + where +
                              ": give xi or amplitude, not both");
        }
        if (!tone.xi && !tone.amplitude) {
            throw ConfigError("scenario: " + where +
                              ": needs xi or a field amplitude");
        }
        if (!(tone.frequency > 0.0)) {
            throw ConfigError("scenario: " + where +
                              ": frequency must be positive");
        }
        StarkSetting setting;
        setting.omega_g = tone.frequency;
        setting.phase = tone.phase;
        if (tone.xi) {
            setting.xi = *tone.xi;
        } else {
            if (*tone.amplitude < 0.0) {
                throw ConfigError("scenario: " + where +
                                  ": amplitude must be >= 0");
            }
            setting.xi =
                (u11 - u22) * *tone.amplitude / (hbar * tone.frequency);
        }
        settings.push_back(setting);
    }

    rs.mixing = build_mixing_from_couplings(rs.model, rabi, detuning,
                                            config.thz.phase, settings);

    try {
        config.rates.validate();
        config.initial_state.validate();
    } catch (const std::domain_error& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    if (config.frames.empty()) {
        throw ConfigError("scenario: frames must not be empty");
    }
    try {
        config.geometry.validate();
    } catch (const std::domain_error& e) {
        throw ConfigError(std::string("scenario: geometry: ") + e.what());
    }

    // Time grid: default span is five periods of the slow population
    // oscillation (at 2 |omega_eff|, falling back to the generalized
    // two-level oscillation when no mixer tone is active), sampled with at
    // least 40 points per fastest drive period.
    if (config.time.t_end) {
        rs.t_end = *config.time.t_end;
        if (!(rs.t_end > 0.0)) {
            throw ConfigError("scenario: time.t_end must be positive");
        }
    } else {
        const double omega_eff = std::abs(rs.mixing.omega_eff);
        const double rabi_mag = rs.mixing.rabi_magnitude();
        if (omega_eff > 0.0) {
            rs.t_end = 5.0 * 2.0 * kPi / (2.0 * omega_eff);
        } else if (rabi_mag > 0.0) {
            const double w = std::hypot(0.5 * rs.mixing.detuning, rabi_mag);
            rs.t_end = 5.0 * 2.0 * kPi / (2.0 * w);
        } else {
            throw ConfigError(
                "scenario: no drive sets a time scale; specify time.t_end");
        }
    }

    if (config.time.samples) {
        rs.samples = *config.time.samples;
        if (rs.samples < 2) {
            throw ConfigError("scenario: time.samples must be >= 2");
        }
    } else {
        double omega_fast = std::abs(rs.mixing.detuning);
        omega_fast = std::max(omega_fast, rs.mixing.rabi_magnitude());
        omega_fast = std::max(omega_fast, 2.0 * std::abs(rs.mixing.omega_eff));
        for (const StarkTone& tone : rs.mixing.stark) {
            omega_fast = std::max(omega_fast, tone.omega_g);
        }
        const double per_period = 40.0;
        long long n = 41;
        if (omega_fast > 0.0) {
            n = static_cast<long long>(
                    std::ceil(rs.t_end * omega_fast * per_period /
                              (2.0 * kPi))) +
                1;
        }
        rs.samples = std::clamp<long long>(n, 41, 400001);
    }

    rs.grid.resize(static_cast<std::size_t>(rs.samples));
    for (long long i = 0; i < rs.samples; ++i) {
        rs.grid[static_cast<std::size_t>(i)] =
            rs.t_end * static_cast<double>(i) /
            static_cast<double>(rs.samples - 1);
    }
    return rs;
}

// ---------------------------------------------------------------------------
// validation report

ValidationReport validate_scenario(const ScenarioConfig& config) {
    ValidationReport report;
    ResolvedScenario rs;
    try {
        rs = resolve(config);
    } catch (const std::exception& e) {
        report.errors.push_back(e.what());
        report.ok = false;
        return report;
    }
    report.ok = true;

    const auto line = [&report](const std::string& s) {
        report.derived.push_back(s);
    };
    line("image strength = " + format_full(rs.model.lambda_param));
    line("effective Bohr radius = " + format_full(rs.model.bohr_radius) +
         " m");
    line("transition = " + format_full(rs.mixing.omega12) +
         " rad/s (ordinary " +
         format_full(rs.model.transition_frequency() / 1e12) + " THz)");
    line("thz coupling = " + format_full(rs.mixing.rabi) +
         " rad/s at detuning " + format_full(rs.mixing.detuning) + " rad/s" +
         " (field " + format_full(rs.mixing.thz_amplitude) + " V/m)");
    for (std::size_t k = 0; k < rs.mixing.stark.size(); ++k) {
        const StarkTone& tone = rs.mixing.stark[k];
        line("stark tone " + std::to_string(k + 1) + ": xi = " +
             format_full(tone.xi) + ", omega_g = " + format_full(tone.omega_g) +
             " rad/s, level couplings = " + format_full(tone.stark11) + " / " +
             format_full(tone.stark22) + " rad/s (field " +
             format_full(tone.amplitude) + " V/m)");
    }
    line("effective mixer coupling = " + format_full(rs.mixing.omega_eff) +
         " rad/s");
    if (!rs.mixing.stark.empty()) {
        line("residual detuning after one GHz quantum = " +
             format_full(rs.mixing.small_detuning()) + " rad/s");
    }
    line("grid: t_end = " + format_full(rs.t_end) + " s, samples = " +
         std::to_string(rs.samples));
    std::string frames = "frames:";
    for (Frame f : rs.config.frames) frames += " " + frame_name(f);
    line(frames);

    report.warnings = rs.mixing.warnings;
    // Sampling sanity for explicitly pinned grids.
    if (rs.samples > 1) {
        const double dt = rs.t_end / static_cast<double>(rs.samples - 1);
        double omega_fast = std::abs(rs.mixing.detuning);
        for (const StarkTone& tone : rs.mixing.stark) {
            omega_fast = std::max(omega_fast, tone.omega_g);
        }
        if (omega_fast > kPi / dt) {
            report.warnings.push_back(
                "output grid undersamples the fastest drive (aliasing in "
                "spectra)");
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// run pipeline

RunManifest run_scenario(const ScenarioConfig& config,
                         const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    ResolvedScenario rs = resolve(config);

    const fs::path out_dir(options.output_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory '" +
                                 out_dir.string() + "': " + ec.message());
    }

    RunManifest manifest;
    manifest.scenario = rs.config.name;
    manifest.hash = config_hash(rs.config);
    manifest.version = kVersion;
    manifest.warnings = rs.mixing.warnings;

    IntegratorOptions iopts;
    iopts.rel_tol = options.rel_tol;
    iopts.abs_tol = options.abs_tol;
    iopts.fixed_step = options.fixed_step;

    const SpectrumWindow window =
        options.window_override.value_or(rs.config.spectrum.window);
    const double time_scale = rs.mixing.rabi_magnitude();

    const auto emit = [&](const std::string& filename,
                          const std::string& content) {
        write_text_file(out_dir / filename, content);
        manifest.outputs.push_back(filename);
    };

    for (Frame frame : rs.config.frames) {
        const FrameHamiltonian hamiltonian = hamiltonian_for(frame, rs.mixing);
        const Trajectory traj =
            integrate(rs.config.initial_state, hamiltonian, rs.config.rates,
                      rs.t_end, rs.grid, iopts);
        const std::string tag = frame_name(frame);
        manifest.integrator[tag] = traj.stats;

        emit("trajectory_" + tag + ".csv", trajectory_csv(traj, time_scale));

        if (rs.config.spectrum.enabled && rs.grid.size() >= 8) {
            const SpectrumResult with_mean =
                windowed_spectrum(traj, window, rs.mixing);
            const SpectrumResult mean_removed =
                detrended_spectrum(traj, window, rs.mixing);
            for (const std::string& w : with_mean.warnings) {
                manifest.warnings.push_back(tag + ": " + w);
            }
            emit("spectrum_" + tag + ".csv", spectrum_csv(with_mean));

            json peaks{
                {"frame", tag},
                {"window", window_name(window)},
                {"bin_width", with_mean.bin_width},
                {"with_mean", peak_to_json(with_mean)},
                {"mean_removed", peak_to_json(mean_removed)},
            };
            emit("peaks_" + tag + ".json", peaks.dump(2) + "\n");
        }

        if (rs.config.report_steady_state) {
            if (hamiltonian.time_independent) {
                try {
                    const DensityMatrix fixed =
                        steady_state(hamiltonian, rs.config.rates);
                    json report{
                        {"frame", tag},
                        {"fixed_point", state_to_json(fixed)},
                        {"final_state", state_to_json(traj.states.back())},
                        {"population_gap",
                         std::abs(fixed.rho22 - traj.states.back().rho22)},
                        {"image_charge_fixed_point_c",
                         image_charge(fixed.rho22, rs.config.geometry,
                                      rs.model)},
                    };
                    emit("steady_state_" + tag + ".json",
                         report.dump(2) + "\n");
                } catch (const NumericsError& e) {
                    manifest.warnings.push_back(
                        tag + ": steady-state report skipped: " +
                        std::string(e.what()));
                }
            } else {
                manifest.warnings.push_back(
                    tag +
                    ": steady-state report skipped: Hamiltonian is "
                    "time-dependent");
            }
        }
    }

    const auto end = std::chrono::steady_clock::now();
    manifest.wall_seconds =
        std::chrono::duration<double>(end - start).count();

    json integrator;
    for (const auto& [tag, stats] : manifest.integrator) {
        integrator[tag] = {{"steps_accepted", stats.steps_accepted},
                           {"steps_rejected", stats.steps_rejected},
                           {"rhs_evaluations", stats.rhs_evaluations}};
    }
    json mj{
        {"scenario", manifest.scenario},
        {"hash", manifest.hash},
        {"version", manifest.version},
        {"wall_seconds", manifest.wall_seconds},
        {"outputs", manifest.outputs},
        {"warnings", manifest.warnings},
        {"integrator", integrator},
        {"config", config_echo(rs.config)},
    };
    write_text_file(out_dir / "manifest.json", mj.dump(2) + "\n");

    return manifest;
}

ScenarioConfig load_scenario(const std::string& name_or_path) {
    for (const std::string& name : builtin_scenario_names()) {
        if (name == name_or_path) {
            return builtin_scenario(name);
        }
    }
    if (fs::exists(name_or_path)) {
        return parse_scenario_file(name_or_path);
    }
    throw ConfigError("load_scenario: '" + name_or_path +
                      "' is neither a built-in scenario nor a readable file");
}

RunManifest run_scenario(const std::string& name_or_path,
                         const RunOptions& options) {
    return run_scenario(load_scenario(name_or_path), options);
}

// ---------------------------------------------------------------------------
// frame comparison

FrameComparison compare_frames(const ScenarioConfig& config,
                               const RunOptions& options) {
    ResolvedScenario rs = resolve(config);
    if (rs.config.frames.size() < 2) {
        throw ConfigError("compare_frames: need at least two frames");
    }

    IntegratorOptions iopts;
    iopts.rel_tol = options.rel_tol;
    iopts.abs_tol = options.abs_tol;
    iopts.fixed_step = options.fixed_step;

    FrameComparison comparison;
    comparison.times = rs.grid;
    for (Frame frame : rs.config.frames) {
        const FrameHamiltonian hamiltonian = hamiltonian_for(frame, rs.mixing);
        comparison.trajectories.emplace_back(
            frame, integrate(rs.config.initial_state, hamiltonian,
                             rs.config.rates, rs.t_end, rs.grid, iopts));
    }

    for (std::size_t a = 0; a < comparison.trajectories.size(); ++a) {
        for (std::size_t b = a + 1; b < comparison.trajectories.size(); ++b) {
            const auto& [frame_a, traj_a] = comparison.trajectories[a];
            const auto& [frame_b, traj_b] = comparison.trajectories[b];
            FrameDelta delta;
            delta.reference = frame_a;
            delta.other = frame_b;
            delta.exact =
                frame_a != Frame::Rwa && frame_b != Frame::Rwa;
            for (std::size_t i = 0; i < rs.grid.size(); ++i) {
                const double t = rs.grid[i];
                delta.max_population_delta = std::max(
                    delta.max_population_delta,
                    std::abs(traj_a.states[i].rho22 -
                             traj_b.states[i].rho22));
                const std::complex<double> ca = to_stark_coherence(
                    frame_a, traj_a.states[i].rho12, t, rs.mixing);
                const std::complex<double> cb = to_stark_coherence(
                    frame_b, traj_b.states[i].rho12, t, rs.mixing);
                delta.max_coherence_delta =
                    std::max(delta.max_coherence_delta, std::abs(ca - cb));
            }
            comparison.deltas.push_back(delta);
        }
    }
    return comparison;
}

std::string comparison_to_json(const FrameComparison& comparison) {
    json frames = json::array();
    for (const auto& [frame, traj] : comparison.trajectories) {
        frames.push_back(frame_name(frame));
    }
    json pairs = json::array();
    for (const FrameDelta& d : comparison.deltas) {
        pairs.push_back({{"reference", frame_name(d.reference)},
                         {"other", frame_name(d.other)},
                         {"exact", d.exact},
                         {"max_population_delta", d.max_population_delta},
                         {"max_coherence_delta", d.max_coherence_delta}});
    }
    json out{
        {"frames", frames},
        {"samples", comparison.times.size()},
        {"t_end_s",
         comparison.times.empty() ? 0.0 : comparison.times.back()},
        {"pairs", pairs},
    };
    return out.dump(2) + "\n";
}

}  // namespace helimix
