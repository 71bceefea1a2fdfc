#include "spinpair/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spinpair/error.hpp"
#include "spinpair/io.hpp"
#include "spinpair/oracle.hpp"

#ifndef SPINPAIR_VERSION
#define SPINPAIR_VERSION "unknown"
#endif

namespace spinpair {

using nlohmann::json;

std::string_view code_version() { return SPINPAIR_VERSION; }

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw InputError("config: " + message);
}

// Runs one pipeline stage, prefixing any library error with the stage name.
template <class Fn>
auto staged(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const InputError& e) {
        throw InputError(std::string(stage) + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError(std::string(stage) + ": " + e.what());
    }
}

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                  const std::string& content) {
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << content;
    out.close();
    if (!out) throw InputError("failed writing " + path.string());
    return path;
}

template <class Writer>
std::string to_text(Writer&& writer) {
    std::ostringstream out;
    writer(out);
    return out.str();
}

ParsedSystem load(const RunConfig& config) {
    if (config.system_path.empty()) throw InputError("parse: no system file given");
    return staged("parse", [&] { return load_system(config.system_path); });
}

std::optional<BathSpec> bath_or_none(const RunConfig& config) {
    const auto spec = config.bath_spec();
    if (spec.density > 0.0) return spec;
    return std::nullopt;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void add_manifest(Artifacts& artifacts, const RunConfig& config, std::string_view command) {
    artifacts.files.push_back(
        write_file(config.output_dir, "manifest.json", manifest_json(config, command)));
}

}  // namespace

void RunConfig::validate() const {
    require(box_edge > 0.0 && std::isfinite(box_edge), "box_edge must be positive");
    require(density >= 0.0 && std::isfinite(density), "density must be >= 0");
    require(dilution > 0.0 && dilution <= 1.0, "dilution must lie in (0, 1]");
    require(exclusion_radius >= 0.0, "exclusion_radius must be >= 0");
    require(n_configs >= 1, "n_configs must be >= 1");
    require(t_max > 0.0 && std::isfinite(t_max), "t_max must be positive");
    require(n_points >= 2, "n_points must be >= 2");
    require(cutoff_r > 0.0, "cutoff_r must be positive");
    require(alpha2_floor >= 0.0 && alpha2_floor < 1.0, "alpha2_floor must lie in [0, 1)");
    require(orientations >= 1, "orientations must be >= 1");
    require(!horizon || *horizon > 0.0, "horizon must be positive");
    require(bin_width > 0.0, "bin_width must be positive");
    require(sample_count >= 1, "sample_count must be >= 1");
    for (const auto& c : classes) parse_pair_class(c);
    for (double f : factors) require(f > 0.0 && f <= 1.0, "density factors must lie in (0, 1]");
    if (solvent) {
        require(solvent->mass_density > 0.0, "solvent mass density must be positive");
        require(solvent->molar_mass > 0.0, "solvent molar mass must be positive");
        require(solvent->spins_per_molecule >= 0.0, "solvent spins per molecule must be >= 0");
    }
    parse_t2_method(t2_method);
}

double RunConfig::resolved_density() const {
    if (solvent) {
        return density_from_solvent(solvent->mass_density, solvent->molar_mass,
                                    solvent->spins_per_molecule, dilution);
    }
    return density * dilution;
}

BathSpec RunConfig::bath_spec() const {
    BathSpec spec;
    spec.box_edge = box_edge;
    spec.density = resolved_density();
    spec.exclusion_radius = exclusion_radius;
    spec.isotope = bath_isotope;
    spec.n_configs = n_configs;
    spec.seed = seed;
    return spec;
}

SimulationOptions RunConfig::simulation_options() const {
    SimulationOptions options;
    options.grid = TimeGrid::uniform(t_max, n_points);
    options.coupling.cutoff_r = cutoff_r;
    options.coupling.alpha2_floor = alpha2_floor;
    if (!classes.empty()) {
        ClassSet set;
        for (const auto& c : classes) set.insert(parse_pair_class(c));
        options.class_filter = set;
    }
    options.workers = workers;
    options.orientations = orientations;
    return options;
}

T2Method RunConfig::method() const { return parse_t2_method(t2_method); }

std::string file_hash(const std::filesystem::path& path) {
    const auto bytes = read_text_file(path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

json input_record(const std::filesystem::path& path) {
    if (path.empty()) return nullptr;
    return {{"path", std::filesystem::absolute(path).lexically_normal().string()},
            {"fnv1a64", file_hash(path)}};
}

std::filesystem::path input_path(const json& record) {
    if (record.is_null()) return {};
    std::filesystem::path path = record.at("path").get<std::string>();
    if (std::filesystem::exists(path) && file_hash(path) != record.at("fnv1a64").get<std::string>()) {
        throw InputError("manifest: " + path.string() + " changed since the manifest was written");
    }
    return path;
}

}  // namespace

std::string manifest_json(const RunConfig& config, std::string_view command) {
    json bath = {
        {"box_edge_angstrom", config.box_edge},
        {"density_per_angstrom3", config.density},
        {"resolved_density_per_angstrom3", config.resolved_density()},
        {"dilution", config.dilution},
        {"exclusion_radius_angstrom", config.exclusion_radius},
        {"isotope", config.bath_isotope},
        {"n_configs", config.n_configs},
        {"solvent", nullptr},
    };
    if (config.solvent) {
        bath["solvent"] = {{"mass_density_g_cm3", config.solvent->mass_density},
                           {"molar_mass_g_mol", config.solvent->molar_mass},
                           {"spins_per_molecule", config.solvent->spins_per_molecule}};
    }
    json doc = {
        {"command", std::string(command)},
        {"code_version", std::string(code_version())},
        {"seed", config.seed},
        {"inputs",
         {{"system", input_record(config.system_path)},
          {"oracle_problem", input_record(config.problem_path)},
          {"curve", input_record(config.curve_path)}}},
        {"bath", bath},
        {"time_grid", {{"t_max_us", config.t_max}, {"n_points", config.n_points}}},
        {"couplings",
         {{"cutoff_r_angstrom", number_or_null(config.cutoff_r)},
          {"alpha2_floor", config.alpha2_floor},
          {"classes", config.classes},
          {"orientations", config.orientations}}},
        {"analysis",
         {{"t2_method", config.t2_method},
          {"horizon_us", config.horizon ? json(*config.horizon) : json(nullptr)},
          {"top_n", config.top_n},
          {"bin_width_angstrom", config.bin_width},
          {"group", config.group},
          {"factors", config.factors},
          {"sample_first", config.sample_first},
          {"sample_count", config.sample_count}}},
    };
    return doc.dump(2) + "\n";
}

std::string manifest_command(std::string_view manifest) {
    try {
        return json::parse(manifest).at("command").get<std::string>();
    } catch (const json::exception& e) {
        throw InputError(std::string("manifest: ") + e.what());
    }
}

RunConfig config_from_manifest(std::string_view manifest) {
    RunConfig c;
    try {
        const json doc = json::parse(manifest);
        c.seed = doc.at("seed").get<std::uint64_t>();
        const auto& inputs = doc.at("inputs");
        c.system_path = input_path(inputs.at("system"));
        c.problem_path = input_path(inputs.at("oracle_problem"));
        c.curve_path = input_path(inputs.at("curve"));

        const auto& bath = doc.at("bath");
        c.box_edge = bath.at("box_edge_angstrom").get<double>();
        c.density = bath.at("density_per_angstrom3").get<double>();
        c.dilution = bath.at("dilution").get<double>();
        c.exclusion_radius = bath.at("exclusion_radius_angstrom").get<double>();
        c.bath_isotope = bath.at("isotope").get<std::string>();
        c.n_configs = bath.at("n_configs").get<std::size_t>();
        if (!bath.at("solvent").is_null()) {
            const auto& s = bath.at("solvent");
            c.solvent = SolventSpec{s.at("mass_density_g_cm3").get<double>(),
                                    s.at("molar_mass_g_mol").get<double>(),
                                    s.at("spins_per_molecule").get<double>()};
        }

        const auto& grid = doc.at("time_grid");
        c.t_max = grid.at("t_max_us").get<double>();
        c.n_points = grid.at("n_points").get<std::size_t>();

        const auto& couplings = doc.at("couplings");
        const auto& cutoff = couplings.at("cutoff_r_angstrom");
        c.cutoff_r = cutoff.is_null() ? std::numeric_limits<double>::infinity() : cutoff.get<double>();
        c.alpha2_floor = couplings.at("alpha2_floor").get<double>();
        c.classes = couplings.at("classes").get<std::vector<std::string>>();
        c.orientations = couplings.at("orientations").get<std::size_t>();

        const auto& analysis = doc.at("analysis");
        c.t2_method = analysis.at("t2_method").get<std::string>();
        if (!analysis.at("horizon_us").is_null()) c.horizon = analysis.at("horizon_us").get<double>();
        c.top_n = analysis.at("top_n").get<std::size_t>();
        c.bin_width = analysis.at("bin_width_angstrom").get<double>();
        c.group = analysis.at("group").get<std::vector<std::size_t>>();
        c.factors = analysis.at("factors").get<std::vector<double>>();
        c.sample_first = analysis.at("sample_first").get<std::size_t>();
        c.sample_count = analysis.at("sample_count").get<std::size_t>();
    } catch (const json::exception& e) {
        throw InputError(std::string("manifest: ") + e.what());
    }
    c.validate();
    return c;
}

std::string t2_json(const T2Result& result) {
    json doc = {
        {"status", "ok"},
        {"method", std::string(to_string(result.method))},
        {"t2_us", result.t2},
        {"stretch_beta", result.stretch_beta ? json(*result.stretch_beta) : json(nullptr)},
        {"fit_residual", result.fit_residual},
    };
    return doc.dump(2) + "\n";
}

namespace {

std::string t2_failure_json(T2Method method, const InsufficientDecay& e) {
    json doc = {
        {"status", "insufficient-decay"},
        {"method", std::string(to_string(method))},
        {"t2_us", nullptr},
        {"curve_minimum", e.min_value()},
    };
    return doc.dump(2) + "\n";
}

std::vector<RankedPair> ranked_for_first_config(const RunConfig& config, const SpinSystem& system) {
    const auto bath = bath_or_none(config);
    const auto sample = bath ? staged("bath", [&] { return sample_configuration(*bath, system, 0); })
                             : BathConfiguration{};
    auto contributions = staged("couplings", [&] {
        return configuration_contributions(system, sample, config.simulation_options().coupling);
    });
    if (!config.classes.empty()) {
        const auto filter = *config.simulation_options().class_filter;
        std::erase_if(contributions,
                      [&](const PairContribution& c) { return !filter.contains(c.pair_class); });
    }
    const double horizon = config.horizon.value_or(config.t_max);
    return staged("ranking", [&] { return rank_pairs(contributions, horizon, config.top_n); });
}

}  // namespace

Artifacts run_simulate(const RunConfig& config) {
    config.validate();
    const auto parsed = load(config);
    Artifacts artifacts;
    artifacts.warnings = parsed.warnings;

    const auto result = staged("dephasing", [&] {
        return simulate(parsed.system, bath_or_none(config), config.simulation_options());
    });
    artifacts.files.push_back(write_file(config.output_dir, "coherence.csv", to_text([&](auto& out) {
                                             write_curve_csv(out, result.coherence);
                                         })));

    std::string t2_doc;
    try {
        t2_doc = t2_json(extract_t2(result.coherence, config.method()));
    } catch (const InsufficientDecay& e) {
        artifacts.warnings.push_back(std::string("t2: ") + e.what());
        t2_doc = t2_failure_json(config.method(), e);
    }
    artifacts.files.push_back(write_file(config.output_dir, "t2.json", t2_doc));

    const auto ranked = ranked_for_first_config(config, parsed.system);
    artifacts.files.push_back(write_file(config.output_dir, "pairs.csv", to_text([&](auto& out) {
                                             write_pairs_csv(out, ranked);
                                         })));
    add_manifest(artifacts, config, "simulate");
    return artifacts;
}

Artifacts run_pairs(const RunConfig& config) {
    config.validate();
    const auto parsed = load(config);
    Artifacts artifacts;
    artifacts.warnings = parsed.warnings;
    const auto ranked = ranked_for_first_config(config, parsed.system);
    artifacts.files.push_back(write_file(config.output_dir, "pairs.csv", to_text([&](auto& out) {
                                             write_pairs_csv(out, ranked);
                                         })));
    add_manifest(artifacts, config, "pairs");
    return artifacts;
}

Artifacts run_profile(const RunConfig& config) {
    config.validate();
    const auto parsed = load(config);
    Artifacts artifacts;
    artifacts.warnings = parsed.warnings;

    std::set<std::size_t> group(config.group.begin(), config.group.end());
    if (group.empty()) {
        for (std::size_t i = 0; i < parsed.system.molecular_spins().size(); ++i) group.insert(i);
    }
    const auto profile = staged("profile", [&] {
        return ensemble_distance_profile(parsed.system, config.bath_spec(),
                                         config.simulation_options().coupling, group,
                                         config.bin_width, config.workers);
    });
    artifacts.files.push_back(write_file(config.output_dir, "profile.csv", to_text([&](auto& out) {
                                             write_profile_csv(out, profile);
                                         })));
    add_manifest(artifacts, config, "profile");
    return artifacts;
}

Artifacts run_bath_sample(const RunConfig& config) {
    config.validate();
    const auto parsed = load(config);
    Artifacts artifacts;
    artifacts.warnings = parsed.warnings;
    const auto spec = config.bath_spec();
    staged("bath", [&] {
        spec.validate();
        return 0;
    });
    for (std::size_t i = 0; i < config.sample_count; ++i) {
        const std::size_t index = config.sample_first + i;
        const auto sample =
            staged("bath", [&] { return sample_configuration(spec, parsed.system, index); });
        char name[40];
        std::snprintf(name, sizeof name, "bath_%06zu.xyz", index);
        artifacts.files.push_back(write_file(config.output_dir, name, to_text([&](auto& out) {
                                                 write_xyz(out, sample, spec, &parsed.system);
                                             })));
    }
    add_manifest(artifacts, config, "bath-sample");
    return artifacts;
}

Artifacts run_sweep(const RunConfig& config) {
    config.validate();
    const auto parsed = load(config);
    Artifacts artifacts;
    artifacts.warnings = parsed.warnings;
    const auto sweep = staged("sweep", [&] {
        return density_sweep(parsed.system, config.bath_spec(), config.factors,
                             config.simulation_options(), config.method());
    });
    artifacts.files.push_back(write_file(config.output_dir, "sweep.csv", to_text([&](auto& out) {
                                             write_sweep_csv(out, sweep);
                                         })));
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        char name[40];
        std::snprintf(name, sizeof name, "coherence_factor_%zu.csv", i);
        artifacts.files.push_back(write_file(config.output_dir, name, to_text([&](auto& out) {
                                                 write_curve_csv(out, sweep[i].coherence);
                                             })));
    }
    add_manifest(artifacts, config, "sweep");
    return artifacts;
}

Artifacts run_oracle(const RunConfig& config) {
    config.validate();
    if (config.problem_path.empty()) throw InputError("parse: no oracle problem file given");
    const auto problem =
        staged("parse", [&] { return parse_oracle_problem(read_text_file(config.problem_path)); });
    const auto grid = TimeGrid::uniform(config.t_max, config.n_points);
    const auto comparison = staged("oracle", [&] { return compare_tcl2(problem, grid); });
    Artifacts artifacts;
    artifacts.files.push_back(write_file(config.output_dir, "oracle.csv", to_text([&](auto& out) {
                                             write_oracle_csv(out, comparison);
                                         })));
    json summary = {{"n_nuclei", problem.n_nuclei()},
                    {"max_abs_deviation", comparison.max_abs_deviation}};
    artifacts.files.push_back(write_file(config.output_dir, "oracle.json", summary.dump(2) + "\n"));
    add_manifest(artifacts, config, "oracle");
    return artifacts;
}

Artifacts run_t2(const RunConfig& config) {
    config.validate();
    if (config.curve_path.empty()) throw InputError("parse: no coherence CSV given");
    const auto curve = staged("parse", [&] {
        std::istringstream in(read_text_file(config.curve_path));
        return read_curve_csv(in);
    });
    const auto result = staged("t2", [&] { return extract_t2(curve, config.method()); });
    Artifacts artifacts;
    artifacts.files.push_back(write_file(config.output_dir, "t2.json", t2_json(result)));
    add_manifest(artifacts, config, "t2");
    return artifacts;
}

Artifacts run_command(std::string_view command, const RunConfig& config) {
    if (command == "simulate") return run_simulate(config);
    if (command == "pairs") return run_pairs(config);
    if (command == "profile") return run_profile(config);
    if (command == "bath-sample") return run_bath_sample(config);
    if (command == "sweep") return run_sweep(config);
    if (command == "oracle") return run_oracle(config);
    if (command == "t2") return run_t2(config);
    throw InputError("unknown command '" + std::string(command) + "'");
}

}  // namespace spinpair
