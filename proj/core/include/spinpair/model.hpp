#pragma once

// Domain types and the unit system.
//
// Internal units: lengths in Angstrom, time in microseconds, every coupling
// as an angular frequency in rad/us. Gyromagnetic ratios stay in SI
// (rad s^-1 T^-1) because they only enter through the coupling formulas.

#include <Eigen/Core>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spinpair {

using Vec3 = Eigen::Vector3d;

namespace constants {
inline constexpr double mu0_over_4pi = 1.00000000055e-7;  // T^2 m^3 J^-1
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double gamma_electron = 1.76085963023e11;  // rad s^-1 T^-1, magnitude
inline constexpr double gamma_1h = 2.6752218744e8;
inline constexpr double gamma_19f = 2.518148e8;
inline constexpr double avogadro = 6.02214076e23;  // mol^-1
inline constexpr double angstrom = 1e-10;          // m
}  // namespace constants

namespace units {
inline constexpr double per_s_in_per_us = 1e-6;

constexpr double to_rad_per_us(double rad_per_s) { return rad_per_s * per_s_in_per_us; }
constexpr double to_rad_per_s(double rad_per_us) { return rad_per_us / per_s_in_per_us; }
}  // namespace units

struct Isotope {
    std::string label;  // "1H", "19F", ...
    double gamma;       // rad s^-1 T^-1
    int two_spin;       // 2*I; only 1 (spin-1/2) is accepted
};

/// Label -> gyromagnetic ratio table. Immutable once built.
class IsotopeRegistry {
public:
    /// Throws InputError on duplicate labels, non-positive gamma or spin != 1/2.
    explicit IsotopeRegistry(std::vector<Isotope> isotopes);

    /// 1H and 19F.
    static const IsotopeRegistry& defaults();

    /// Throws InputError naming the label when it is not registered.
    [[nodiscard]] double gamma(std::string_view label) const;
    [[nodiscard]] bool contains(std::string_view label) const;
    [[nodiscard]] const std::vector<Isotope>& isotopes() const noexcept { return isotopes_; }

private:
    std::vector<Isotope> isotopes_;
};

/// Gyromagnetic ratio from the default registry.
double lookup_gamma(std::string_view isotope);

enum class HyperfineSource { FromFile, PointDipole };

struct NuclearSpin {
    Vec3 position;        // Angstrom
    std::string isotope;
    double gamma = 0.0;   // rad s^-1 T^-1
    double a_zz = 0.0;    // rad/us
    HyperfineSource a_source = HyperfineSource::FromFile;
};

struct ElectronCenter {
    Vec3 position = Vec3::Zero();
};

struct Atom {
    std::string element;
    Vec3 position;
};

/// Electron, molecular nuclear spins and the atoms that carve the solvent
/// exclusion volume. Validated on construction, read-only afterwards.
class SpinSystem {
public:
    /// field_axis must already be a unit vector (|n| = 1 within 1e-12).
    /// Spins must sit on atom positions and carry finite a_zz.
    SpinSystem(ElectronCenter electron, std::vector<NuclearSpin> molecular_spins,
               std::vector<Atom> molecular_atoms, Vec3 field_axis = Vec3::UnitZ());

    [[nodiscard]] const ElectronCenter& electron() const noexcept { return electron_; }
    [[nodiscard]] const std::vector<NuclearSpin>& molecular_spins() const noexcept {
        return spins_;
    }
    [[nodiscard]] const std::vector<Atom>& molecular_atoms() const noexcept { return atoms_; }
    [[nodiscard]] const Vec3& field_axis() const noexcept { return field_axis_; }

    /// Same system viewed with a different quantization axis. Spins whose
    /// hyperfine came from the point-dipole model are recomputed; file values
    /// are kept as given.
    [[nodiscard]] SpinSystem with_field_axis(const Vec3& axis) const;

private:
    ElectronCenter electron_;
    std::vector<NuclearSpin> spins_;
    std::vector<Atom> atoms_;
    Vec3 field_axis_;
};

/// Molecular spin whose hyperfine is computed from the electron position.
NuclearSpin point_dipole_spin(const ElectronCenter& electron, const Vec3& position,
                              std::string_view isotope, const Vec3& field_axis);

}  // namespace spinpair
