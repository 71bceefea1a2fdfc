#include "spinpair/bath.hpp"

#include <cctype>
#include <cmath>
#include <ostream>
#include <random>

#include "spinpair/error.hpp"

namespace spinpair {

void BathSpec::validate() const {
    if (!(box_edge > 0.0) || !std::isfinite(box_edge)) throw InputError("box_edge must be positive");
    if (!(density >= 0.0) || !std::isfinite(density)) throw InputError("density must be non-negative");
    if (!(exclusion_radius >= 0.0)) throw InputError("exclusion_radius must be non-negative");
    if (n_configs < 1) throw InputError("n_configs must be at least 1");
    lookup_gamma(isotope);
}

double density_from_solvent(double mass_density_g_cm3, double molar_mass_g_mol,
                            double spins_per_molecule, double dilution_factor) {
    if (!(mass_density_g_cm3 > 0.0)) throw InputError("solvent mass density must be positive");
    if (!(molar_mass_g_mol > 0.0)) throw InputError("solvent molar mass must be positive");
    if (!(spins_per_molecule >= 0.0)) throw InputError("spins per molecule must be non-negative");
    if (!(dilution_factor > 0.0 && dilution_factor <= 1.0)) {
        throw InputError("dilution factor must lie in (0, 1]");
    }
    constexpr double cm3_in_a3 = 1e24;
    const double per_cm3 =
        mass_density_g_cm3 * constants::avogadro * spins_per_molecule / molar_mass_g_mol;
    return dilution_factor * per_cm3 / cm3_in_a3;
}

namespace {

// Independent stream per (seed, config_index): both words of each feed the
// seed sequence, so neighbouring indices share no state.
std::mt19937_64 configuration_engine(std::uint64_t seed, std::size_t config_index) {
    const auto index = static_cast<std::uint64_t>(config_index);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      0x5eedba75u};
    return std::mt19937_64(seq);
}

}  // namespace

BathConfiguration sample_configuration(const BathSpec& spec, const SpinSystem& system,
                                       std::size_t config_index) {
    spec.validate();
    BathConfiguration config;
    config.config_index = config_index;
    config.isotope = spec.isotope;

    const double mean = spec.density * spec.box_edge * spec.box_edge * spec.box_edge;
    if (mean <= 0.0) return config;

    auto engine = configuration_engine(spec.seed, config_index);
    std::poisson_distribution<std::uint64_t> count_dist(mean);
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    const std::uint64_t n = count_dist(engine);

    const Vec3& center = system.electron().position;
    const auto& atoms = system.molecular_atoms();
    const double r2 = spec.exclusion_radius * spec.exclusion_radius;
    config.positions.reserve(static_cast<std::size_t>(n));
    for (std::uint64_t i = 0; i < n; ++i) {
        Vec3 p;
        // Explicit sequencing; argument evaluation order is unspecified.
        p.x() = unit(engine);
        p.y() = unit(engine);
        p.z() = unit(engine);
        p = center + spec.box_edge * p;
        bool excluded = false;
        for (const auto& atom : atoms) {
            if ((p - atom.position).squaredNorm() < r2) {
                excluded = true;
                break;
            }
        }
        if (!excluded) config.positions.push_back(p);
    }
    return config;
}

BathEnsemble::BathEnsemble(BathSpec spec, const SpinSystem& system)
    : spec_(std::move(spec)), system_(&system) {
    spec_.validate();
}

BathConfiguration BathEnsemble::operator[](std::size_t config_index) const {
    return sample_configuration(spec_, *system_, config_index);
}

BathEnsemble ensemble(const BathSpec& spec, const SpinSystem& system) {
    return BathEnsemble(spec, system);
}

namespace {

std::string element_of(const std::string& isotope) {
    std::string element;
    for (char ch : isotope) {
        if (std::isalpha(static_cast<unsigned char>(ch))) element.push_back(ch);
    }
    return element.empty() ? "X" : element;
}

}  // namespace

void write_xyz(std::ostream& out, const BathConfiguration& config, const BathSpec& spec,
               const SpinSystem* molecule) {
    const std::size_t n_mol = molecule ? molecule->molecular_atoms().size() : 0;
    out << n_mol + config.positions.size() << '\n';
    out << "bath configuration " << config.config_index << " seed " << spec.seed << " density "
        << spec.density << " box " << spec.box_edge << '\n';
    const auto old_precision = out.precision(10);
    if (molecule) {
        for (const auto& atom : molecule->molecular_atoms()) {
            out << atom.element << ' ' << atom.position.x() << ' ' << atom.position.y() << ' '
                << atom.position.z() << '\n';
        }
    }
    const std::string element = element_of(config.isotope);
    for (const auto& p : config.positions) {
        out << element << ' ' << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    }
    out.precision(old_precision);
}

}  // namespace spinpair
