// main.cpp — helimix command line: run scenarios, validate configs,
// compare dynamical frames, and list the built-in scenario catalog.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include "helimix/errors.hpp"
#include "helimix/observables.hpp"
#include "helimix/scenario.hpp"
#include "helimix/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;   // bad input: config file, units, domains
constexpr int kExitRuntime = 3;  // numerical failure or I/O trouble

struct RunArgs {
    std::string scenario;
    std::string out_dir;  // empty -> out/<scenario name>
    std::optional<double> fixed_step_ns;
    std::string window;  // empty -> scenario choice
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
};

helimix::RunOptions make_options(const RunArgs& args,
                                 const helimix::ScenarioConfig& config) {
    helimix::RunOptions options;
    options.output_dir =
        args.out_dir.empty()
            ? (std::filesystem::path("out") / config.name).string()
            : args.out_dir;
    if (args.fixed_step_ns) {
        options.fixed_step = *args.fixed_step_ns * 1e-9;
    }
    if (!args.window.empty()) {
        options.window_override = helimix::window_from_name(args.window);
    }
    options.rel_tol = args.rel_tol;
    options.abs_tol = args.abs_tol;
    return options;
}

int do_list() {
    for (const auto& [name, description] :
         helimix::builtin_scenario_catalog()) {
        std::printf("%-16s %s\n", name.c_str(), description.c_str());
    }
    return kExitOk;
}

int do_validate(const std::string& scenario) {
    const helimix::ScenarioConfig config = helimix::load_scenario(scenario);
    const helimix::ValidationReport report =
        helimix::validate_scenario(config);
    std::printf("scenario: %s (hash %s)\n", config.name.c_str(),
                helimix::config_hash(config).c_str());
    for (const std::string& line : report.derived) {
        std::printf("  %s\n", line.c_str());
    }
    for (const std::string& line : report.warnings) {
        std::printf("warning: %s\n", line.c_str());
    }
    for (const std::string& line : report.errors) {
        std::printf("error: %s\n", line.c_str());
    }
    std::printf(report.ok ? "OK\n" : "INVALID\n");
    return report.ok ? kExitOk : kExitConfig;
}

int do_run(const RunArgs& args) {
    const helimix::ScenarioConfig config =
        helimix::load_scenario(args.scenario);
    const helimix::RunOptions options = make_options(args, config);
    const helimix::RunManifest manifest =
        helimix::run_scenario(config, options);
    std::printf("scenario  %s\n", manifest.scenario.c_str());
    std::printf("hash      %s\n", manifest.hash.c_str());
    std::printf("wall      %.3f s\n", manifest.wall_seconds);
    for (const auto& [tag, stats] : manifest.integrator) {
        std::printf("steps     %-16s accepted %lld, rejected %lld, "
                    "rhs calls %lld\n",
                    tag.c_str(), stats.steps_accepted, stats.steps_rejected,
                    stats.rhs_evaluations);
    }
    for (const std::string& line : manifest.warnings) {
        std::printf("warning   %s\n", line.c_str());
    }
    for (const std::string& path : manifest.outputs) {
        std::printf("wrote     %s\n", path.c_str());
    }
    return kExitOk;
}

int do_compare(const RunArgs& args) {
    const helimix::ScenarioConfig config =
        helimix::load_scenario(args.scenario);
    const helimix::RunOptions options = make_options(args, config);
    const helimix::FrameComparison comparison =
        helimix::compare_frames(config, options);

    std::filesystem::create_directories(options.output_dir);
    const std::filesystem::path report_path =
        std::filesystem::path(options.output_dir) / "comparison.json";
    {
        std::ofstream out(report_path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot open '" + report_path.string() +
                                     "' for writing");
        }
        out << helimix::comparison_to_json(comparison);
    }

    for (const helimix::FrameDelta& d : comparison.deltas) {
        std::printf("%s vs %s (%s): max |d rho22| = %.3e, "
                    "max |d rho12| = %.3e\n",
                    helimix::frame_name(d.reference).c_str(),
                    helimix::frame_name(d.other).c_str(),
                    d.exact ? "exact" : "approximate",
                    d.max_population_delta, d.max_coherence_delta);
    }
    std::printf("wrote     %s\n", report_path.string().c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"helimix: driven two-level surface electron simulator"};
    app.set_version_flag("--version", helimix::kVersion);
    app.require_subcommand(1);

    RunArgs args;

    CLI::App* run = app.add_subcommand(
        "run", "Integrate a scenario and write trajectories, spectra, and a "
               "manifest");
    run->add_option("scenario", args.scenario,
                    "Built-in scenario name or path to a JSON file")
        ->required();
    run->add_option("--out-dir", args.out_dir,
                    "Output directory (default: out/<scenario name>)");
    run->add_option("--fixed-step-ns", args.fixed_step_ns,
                    "Integrate with a fixed step of this many nanoseconds "
                    "(deterministic output)");
    run->add_option("--window", args.window,
                    "Spectrum window override: rectangular or hann");
    run->add_option("--rel-tol", args.rel_tol,
                    "Adaptive integrator relative tolerance");
    run->add_option("--abs-tol", args.abs_tol,
                    "Adaptive integrator absolute tolerance");

    CLI::App* validate = app.add_subcommand(
        "validate", "Parse a scenario, report derived quantities, and check "
                    "for problems without integrating");
    std::string validate_scenario_arg;
    validate
        ->add_option("scenario", validate_scenario_arg,
                     "Built-in scenario name or path to a JSON file")
        ->required();

    CLI::App* compare = app.add_subcommand(
        "compare-frames", "Integrate every configured frame and report "
                          "pairwise agreement (writes comparison.json)");
    compare
        ->add_option("scenario", args.scenario,
                     "Built-in scenario name or path to a JSON file")
        ->required();
    compare->add_option("--out-dir", args.out_dir,
                        "Output directory (default: out/<scenario name>)");
    compare->add_option("--fixed-step-ns", args.fixed_step_ns,
                        "Fixed integrator step in nanoseconds");
    compare->add_option("--rel-tol", args.rel_tol,
                        "Adaptive integrator relative tolerance");
    compare->add_option("--abs-tol", args.abs_tol,
                        "Adaptive integrator absolute tolerance");

    CLI::App* list = app.add_subcommand(
        "list-scenarios", "List the built-in scenario catalog");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (list->parsed()) return do_list();
        if (validate->parsed()) return do_validate(validate_scenario_arg);
        if (run->parsed()) return do_run(args);
        if (compare->parsed()) return do_compare(args);
        return kExitConfig;  // unreachable: a subcommand is required
    } catch (const helimix::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const helimix::IntegrationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    } catch (const helimix::NumericsError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
}
