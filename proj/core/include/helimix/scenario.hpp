// scenario.hpp — named simulation setups: parsing, validation, and the run
// pipeline that turns a configuration into trajectory/spectrum files plus a
// manifest.
//
// Configurations come from JSON files or from the built-in catalog. All
// quantities are stored in SI (rad/s, s, m) after parsing; the JSON schema
// carries explicit unit suffixes and an `angular` flag selecting between
// angular (rad/s, default) and ordinary (cycles/s) frequency inputs.

#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "helimix/drive_mixing.hpp"
#include "helimix/lindblad.hpp"
#include "helimix/observables.hpp"
#include "helimix/surface_state.hpp"

namespace helimix {

// One drive tone as configured: either coupling-first (signed xi or rabi)
// or amplitude-first (field magnitude), never both.
struct ThzSpec {
    std::optional<double> rabi;       // rad/s, signed
    std::optional<double> detuning;   // rad/s (with rabi)
    std::optional<double> amplitude;  // V/m (with frequency)
    std::optional<double> frequency;  // rad/s, absolute
    double phase = 0.0;               // rad
};

struct StarkSpec {
    std::optional<double> xi;         // signed modulation index
    std::optional<double> amplitude;  // V/m
    double frequency = 0.0;           // rad/s
    double phase = 0.0;               // rad
};

struct TimeSpec {
    std::optional<double> t_end;       // s
    std::optional<long long> samples;  // output grid points including t = 0
};

struct SpectrumSpec {
    bool enabled = true;
    SpectrumWindow window = SpectrumWindow::Rectangular;
};

// A full scenario in SI units. Model overrides are mutually exclusive;
// resolve() restores the derived chain epsilon -> Lambda -> r_B whichever
// one is pinned.
struct ScenarioConfig {
    std::string name = "custom";
    std::string description;
    std::optional<double> epsilon;              // dielectric constant
    std::optional<double> lambda;               // image strength
    std::optional<double> bohr_radius;          // m
    ThzSpec thz;
    std::vector<StarkSpec> stark;
    DecoherenceRates rates;
    DensityMatrix initial_state;
    std::vector<Frame> frames{Frame::StarkRotated, Frame::Rwa};
    TimeSpec time;
    SpectrumSpec spectrum;
    ImageChargeGeometry geometry;
    bool report_steady_state = false;
};

// Scenario with every default filled in and the physics objects built.
struct ResolvedScenario {
    ScenarioConfig config;  // echo of the input
    SurfaceStateModel model;
    MixingConfig mixing;
    double t_end = 0.0;
    long long samples = 0;
    std::vector<double> grid;  // uniform, grid.front() = 0, grid.back() = t_end
};

// Parses a JSON scenario (string form or file). Unknown keys and partial
// tone specifications are rejected with ConfigError naming the field.
ScenarioConfig parse_scenario_text(const std::string& json_text);
ScenarioConfig parse_scenario_file(const std::string& path);

// Canonical JSON echo of a configuration: SI units, couplings-first tone
// form, keys sorted. Two inputs describing the same physics (different key
// order or unit convention) serialize identically.
std::string scenario_to_json(const ScenarioConfig& config);

// FNV-1a (64-bit) over the canonical JSON; stable across runs and key order.
std::string config_hash(const ScenarioConfig& config);

// Built-in catalog.
std::vector<std::string> builtin_scenario_names();
ScenarioConfig builtin_scenario(const std::string& name);
// "name -> one-line description" for the catalog listing.
std::vector<std::pair<std::string, std::string>> builtin_scenario_catalog();

// Built-in name or path to a JSON file; ConfigError when it is neither.
ScenarioConfig load_scenario(const std::string& name_or_path);

// Resolves a configuration: builds the surface model and mixing config,
// fills time-grid defaults (five slow mixer periods, >= 40 samples per
// fastest drive period) and validates everything. Throws ConfigError with
// the offending field named.
ResolvedScenario resolve(const ScenarioConfig& config);

// Validation without running: collects every error instead of stopping at
// the first, and reports the derived quantities a reviewer would check
// (couplings, effective drive, guard warnings, grid).
struct ValidationReport {
    bool ok = false;
    std::vector<std::string> errors;
    std::vector<std::string> derived;
    std::vector<std::string> warnings;
};
ValidationReport validate_scenario(const ScenarioConfig& config);

struct RunOptions {
    std::string output_dir = "out";
    std::optional<double> fixed_step;  // s; fixed-step deterministic mode
    std::optional<SpectrumWindow> window_override;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
};

// What a run produced: file names are relative to output_dir.
struct RunManifest {
    std::string scenario;
    std::string hash;
    std::string version;
    double wall_seconds = 0.0;
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;
    std::map<std::string, IntegratorStats> integrator;  // per frame tag
};

// Runs every configured frame on the shared grid, writes one trajectory CSV
// per frame (t, T, rho22, Re rho12, Im rho12), spectrum CSV + peak-summary
// JSON when enabled, optional steady-state reports, and manifest.json
// listing every emitted file.
RunManifest run_scenario(const ScenarioConfig& config,
                         const RunOptions& options = {});

// Convenience: accepts a built-in name or a path to a JSON file.
RunManifest run_scenario(const std::string& name_or_path,
                         const RunOptions& options = {});

// Pairwise frame agreement on the shared grid. Populations compare
// directly; coherences are first mapped through the inter-frame phase
// factor exp(i sum_k xi_k sin(omega_k t + theta_k)) where one side is the
// interaction frame. Pairs involving the rotating-wave reduction are
// approximate by construction and flagged as such.
struct FrameDelta {
    Frame reference = Frame::StarkRotated;
    Frame other = Frame::Interaction;
    bool exact = false;  // agreement expected to integrator accuracy
    double max_population_delta = 0.0;
    double max_coherence_delta = 0.0;
};

struct FrameComparison {
    std::vector<double> times;
    std::vector<std::pair<Frame, Trajectory>> trajectories;
    std::vector<FrameDelta> deltas;
};

FrameComparison compare_frames(const ScenarioConfig& config,
                               const RunOptions& options = {});

// Serialized comparison report (JSON), written by the CLI.
std::string comparison_to_json(const FrameComparison& comparison);

}  // namespace helimix
