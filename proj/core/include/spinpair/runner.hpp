#pragma once

// Subcommand drivers behind the command-line tool. Each takes a fully
// resolved RunConfig, writes its artifacts into output_dir and returns the
// paths it produced.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spinpair/analysis.hpp"
#include "spinpair/bath.hpp"
#include "spinpair/pipeline.hpp"

namespace spinpair {

struct SolventSpec {
    double mass_density = 0.0;  // g cm^-3
    double molar_mass = 0.0;    // g mol^-1
    double spins_per_molecule = 0.0;
};

struct RunConfig {
    std::filesystem::path system_path;
    std::filesystem::path problem_path;  // oracle input
    std::filesystem::path curve_path;    // t2 input

    // Bath. `density` is used unless `solvent` is given; dilution scales both.
    double box_edge = 60.0;
    double density = 0.0;
    std::optional<SolventSpec> solvent;
    double dilution = 1.0;
    double exclusion_radius = 1.0;
    std::string bath_isotope = "1H";
    std::size_t n_configs = 1000;
    std::uint64_t seed = 0;

    double t_max = 100.0;
    std::size_t n_points = 1001;

    double cutoff_r = 8.0;
    double alpha2_floor = 1e-10;
    std::vector<std::string> classes;  // empty: all classes
    std::size_t orientations = 1;

    std::string t2_method = "one-over-e";
    std::optional<double> horizon;  // defaults to t_max
    std::size_t top_n = 20;
    double bin_width = 0.5;
    std::vector<std::size_t> group;  // molecular spin ids for `profile`
    std::vector<double> factors{1.0, 0.5};
    std::size_t sample_first = 0;  // bath-sample range
    std::size_t sample_count = 1;

    std::filesystem::path output_dir = ".";
    std::size_t workers = 0;  // execution only; not part of the manifest

    /// Throws InputError on out-of-range values or a missing system file.
    void validate() const;

    [[nodiscard]] double resolved_density() const;
    [[nodiscard]] BathSpec bath_spec() const;
    [[nodiscard]] SimulationOptions simulation_options() const;
    [[nodiscard]] T2Method method() const;
};

/// Manifest JSON: every model parameter, the seed, the code version and a
/// hash of the system file. Output directory and worker count are omitted
/// so repeated runs produce identical manifests.
std::string manifest_json(const RunConfig& config, std::string_view command);
/// Restores the RunConfig recorded in a manifest (output_dir/workers unset).
/// Throws InputError when a recorded input file no longer matches its hash.
RunConfig config_from_manifest(std::string_view manifest);
std::string manifest_command(std::string_view manifest);

/// 64-bit FNV-1a of the file contents as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

std::string_view code_version();

struct Artifacts {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
};

Artifacts run_simulate(const RunConfig& config);
Artifacts run_pairs(const RunConfig& config);
Artifacts run_profile(const RunConfig& config);
Artifacts run_bath_sample(const RunConfig& config);
Artifacts run_sweep(const RunConfig& config);
Artifacts run_oracle(const RunConfig& config);
/// Reads the (t, coherence) CSV at curve_path and writes t2.json.
Artifacts run_t2(const RunConfig& config);

/// Dispatches on a subcommand name.
Artifacts run_command(std::string_view command, const RunConfig& config);

std::string t2_json(const T2Result& result);

}  // namespace spinpair
