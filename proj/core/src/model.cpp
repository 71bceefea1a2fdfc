#include "spinpair/model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "spinpair/couplings.hpp"
#include "spinpair/error.hpp"

namespace spinpair {

IsotopeRegistry::IsotopeRegistry(std::vector<Isotope> isotopes) : isotopes_(std::move(isotopes)) {
    for (std::size_t i = 0; i < isotopes_.size(); ++i) {
        const auto& iso = isotopes_[i];
        if (iso.two_spin != 1) {
            throw InputError("isotope " + iso.label + ": only spin-1/2 nuclei are supported");
        }
        if (!(iso.gamma > 0.0) || !std::isfinite(iso.gamma)) {
            throw InputError("isotope " + iso.label + ": gyromagnetic ratio must be positive");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (isotopes_[j].label == iso.label) {
                throw InputError("isotope " + iso.label + " registered twice");
            }
        }
    }
}

const IsotopeRegistry& IsotopeRegistry::defaults() {
    static const IsotopeRegistry registry({
        {"1H", constants::gamma_1h, 1},
        {"19F", constants::gamma_19f, 1},
    });
    return registry;
}

bool IsotopeRegistry::contains(std::string_view label) const {
    return std::any_of(isotopes_.begin(), isotopes_.end(),
                       [&](const Isotope& iso) { return iso.label == label; });
}

double IsotopeRegistry::gamma(std::string_view label) const {
    for (const auto& iso : isotopes_) {
        if (iso.label == label) return iso.gamma;
    }
    throw InputError("unknown isotope '" + std::string(label) + "'");
}

double lookup_gamma(std::string_view isotope) { return IsotopeRegistry::defaults().gamma(isotope); }

namespace {

bool finite(const Vec3& v) { return v.allFinite(); }

}  // namespace

SpinSystem::SpinSystem(ElectronCenter electron, std::vector<NuclearSpin> molecular_spins,
                       std::vector<Atom> molecular_atoms, Vec3 field_axis)
    : electron_(std::move(electron)),
      spins_(std::move(molecular_spins)),
      atoms_(std::move(molecular_atoms)),
      field_axis_(std::move(field_axis)) {
    if (!finite(electron_.position)) throw InputError("electron position is not finite");
    if (!finite(field_axis_) || std::abs(field_axis_.norm() - 1.0) > 1e-12) {
        throw InputError("field axis must be a unit vector");
    }
    for (const auto& atom : atoms_) {
        if (!finite(atom.position)) throw InputError("atom " + atom.element + " has non-finite position");
    }
    for (std::size_t i = 0; i < spins_.size(); ++i) {
        const auto& spin = spins_[i];
        const std::string where = "molecular spin " + std::to_string(i);
        if (!std::isfinite(spin.a_zz)) throw InputError(where + ": a_zz is not finite");
        if (!(spin.gamma > 0.0)) throw InputError(where + ": gyromagnetic ratio must be positive");
        const bool on_atom = std::any_of(atoms_.begin(), atoms_.end(), [&](const Atom& a) {
            return a.position == spin.position;
        });
        if (!on_atom) throw InputError(where + " does not sit on any molecular atom");
    }
}

SpinSystem SpinSystem::with_field_axis(const Vec3& axis) const {
    const Vec3 n = axis.normalized();
    std::vector<NuclearSpin> spins = spins_;
    for (auto& spin : spins) {
        if (spin.a_source == HyperfineSource::PointDipole) {
            spin.a_zz = point_dipole_azz(electron_.position, spin.position, spin.gamma, n);
        }
    }
    return SpinSystem(electron_, std::move(spins), atoms_, n);
}

NuclearSpin point_dipole_spin(const ElectronCenter& electron, const Vec3& position,
                              std::string_view isotope, const Vec3& field_axis) {
    NuclearSpin spin;
    spin.position = position;
    spin.isotope = std::string(isotope);
    spin.gamma = lookup_gamma(isotope);
    spin.a_zz = point_dipole_azz(electron.position, position, spin.gamma, field_axis);
    spin.a_source = HyperfineSource::PointDipole;
    return spin;
}

}  // namespace spinpair
