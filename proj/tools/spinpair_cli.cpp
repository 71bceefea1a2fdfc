// spinpair command-line tool. Every RunConfig field is a flag; a TOML/INI
// file given with --config may set any of them and explicit flags win.

#include <cstdlib>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinpair/error.hpp"
#include "spinpair/io.hpp"
#include "spinpair/runner.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct SolventFlags {
    std::optional<double> mass_density, molar_mass, spins;
};

}  // namespace

int main(int argc, char** argv) {
    using namespace spinpair;

    CLI::App app{"Pairwise nuclear spin-bath decoherence of a central electron spin"};
    app.set_version_flag("--version", std::string(code_version()));
    app.set_config("--config", "", "TOML or INI file setting any flag");
    app.require_subcommand(0, 1);

    RunConfig cfg;
    std::string system, problem, curve, out = ".", cutoff = "8";
    std::string replay;
    std::optional<double> horizon;
    SolventFlags solvent;

    app.add_option("--system", system, "System file (JSON)");
    app.add_option("--problem", problem, "Oracle problem file (JSON)");
    app.add_option("--curve", curve, "Coherence CSV for t2");
    app.add_option("--box-edge", cfg.box_edge, "Bath cube edge, Angstrom")->capture_default_str();
    app.add_option("--density", cfg.density, "Bath spin density, 1/Angstrom^3")->capture_default_str();
    app.add_option("--solvent-density", solvent.mass_density, "Solvent mass density, g/cm^3");
    app.add_option("--solvent-molar-mass", solvent.molar_mass, "Solvent molar mass, g/mol");
    app.add_option("--solvent-spins", solvent.spins, "Bath spins per solvent molecule");
    app.add_option("--dilution", cfg.dilution, "Factor in (0,1] applied to the density")
        ->capture_default_str();
    app.add_option("--exclusion-radius", cfg.exclusion_radius, "Angstrom")->capture_default_str();
    app.add_option("--bath-isotope", cfg.bath_isotope)->capture_default_str();
    app.add_option("--n-configs", cfg.n_configs)->capture_default_str();
    app.add_option("--seed", cfg.seed)->capture_default_str();
    app.add_option("--t-max", cfg.t_max, "Total echo time span, us")->capture_default_str();
    app.add_option("--n-points", cfg.n_points)->capture_default_str();
    app.add_option("--cutoff", cutoff, "Pair cutoff, Angstrom ('inf' disables)")->capture_default_str();
    app.add_option("--alpha2-floor", cfg.alpha2_floor)->capture_default_str();
    app.add_option("--classes", cfg.classes, "Pair classes to keep: intra, ms, ss");
    app.add_option("--orientations", cfg.orientations, "Field directions averaged")
        ->capture_default_str();
    app.add_option("--t2-method", cfg.t2_method, "one-over-e or stretched-exp")
        ->capture_default_str();
    app.add_option("--horizon", horizon, "Ranking horizon, us (default t-max)");
    app.add_option("--top-n", cfg.top_n)->capture_default_str();
    app.add_option("--bin-width", cfg.bin_width, "Angstrom")->capture_default_str();
    app.add_option("--group", cfg.group, "Molecular spin ids for profile (default all)");
    app.add_option("--factors", cfg.factors, "Density factors for sweep")->capture_default_str();
    app.add_option("--first", cfg.sample_first, "First configuration for bath-sample")
        ->capture_default_str();
    app.add_option("--count", cfg.sample_count, "Configurations for bath-sample")
        ->capture_default_str();
    app.add_option("-o,--out", out, "Output directory")->capture_default_str();
    app.add_option("--workers", cfg.workers, "Threads (0: all cores)")->capture_default_str();
    app.add_option("--replay", replay, "Re-run the command recorded in a manifest");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"simulate", "Ensemble-averaged Hahn-echo coherence, T2 and pair ranking"},
        {"pairs", "Ranked pair table for configuration 0"},
        {"profile", "Mean modulation depth against pair distance"},
        {"bath-sample", "Write bath configurations as XYZ"},
        {"oracle", "Exact small-system echo against the pair product"},
        {"t2", "T2 from a coherence CSV"},
        {"sweep", "T2 against scaled bath density"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        std::string command;
        if (!app.get_subcommands().empty()) command = app.get_subcommands().front()->get_name();

        if (!replay.empty()) {
            const auto manifest = read_text_file(replay);
            const auto recorded = manifest_command(manifest);
            if (!command.empty() && command != recorded) {
                throw InputError("--replay manifest records '" + recorded + "', not '" + command + "'");
            }
            command = recorded;
            const std::size_t workers = cfg.workers;
            cfg = config_from_manifest(manifest);
            cfg.workers = workers;
        } else {
            if (command.empty()) throw InputError("a subcommand is required (see --help)");
            cfg.system_path = system;
            cfg.problem_path = problem;
            cfg.curve_path = curve;
            cfg.cutoff_r = parse_double(cutoff);
            cfg.horizon = horizon;
            const int given = solvent.mass_density.has_value() + solvent.molar_mass.has_value() +
                              solvent.spins.has_value();
            if (given == 3) {
                cfg.solvent = SolventSpec{*solvent.mass_density, *solvent.molar_mass, *solvent.spins};
            } else if (given != 0) {
                throw InputError(
                    "--solvent-density, --solvent-molar-mass and --solvent-spins go together");
            }
        }
        cfg.output_dir = out;

        const auto artifacts = run_command(command, cfg);
        for (const auto& w : artifacts.warnings) std::cerr << "warning: " << w << '\n';
        for (const auto& f : artifacts.files) std::cout << f.string() << '\n';
        return 0;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}
