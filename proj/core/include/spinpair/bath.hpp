#pragma once

// Random solvent nuclear-spin baths.
//
// A configuration is a Poisson-distributed number of uniform points in a
// cube centred on the electron, minus every point closer than the exclusion
// radius to a molecular atom. Each configuration is a pure function of
// (seed, config_index): its generator is seeded from both, so ensembles do
// not depend on generation order or worker count.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spinpair/model.hpp"

namespace spinpair {

struct BathSpec {
    double box_edge = 60.0;          // Angstrom
    double density = 0.0;            // spins per Angstrom^3
    double exclusion_radius = 1.0;   // Angstrom
    std::string isotope = "1H";
    std::size_t n_configs = 1000;
    std::uint64_t seed = 0;

    /// Throws InputError when a field is out of range.
    void validate() const;
};

struct BathConfiguration {
    std::vector<Vec3> positions;  // Angstrom
    std::size_t config_index = 0;
    std::string isotope = "1H";
};

/// Spins per Angstrom^3 for a neat solvent, scaled by dilution_factor.
double density_from_solvent(double mass_density_g_cm3, double molar_mass_g_mol,
                            double spins_per_molecule, double dilution_factor = 1.0);

BathConfiguration sample_configuration(const BathSpec& spec, const SpinSystem& system,
                                       std::size_t config_index);

/// Lazily generated configurations 0..n_configs-1.
class BathEnsemble {
public:
    BathEnsemble(BathSpec spec, const SpinSystem& system);

    [[nodiscard]] std::size_t size() const noexcept { return spec_.n_configs; }
    [[nodiscard]] BathConfiguration operator[](std::size_t config_index) const;
    [[nodiscard]] const BathSpec& spec() const noexcept { return spec_; }

    class iterator {
    public:
        using value_type = BathConfiguration;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        iterator(const BathEnsemble* owner, std::size_t index) : owner_(owner), index_(index) {}

        BathConfiguration operator*() const { return (*owner_)[index_]; }
        iterator& operator++() {
            ++index_;
            return *this;
        }
        iterator operator++(int) {
            auto copy = *this;
            ++index_;
            return copy;
        }
        bool operator==(const iterator& other) const { return index_ == other.index_; }

    private:
        const BathEnsemble* owner_ = nullptr;
        std::size_t index_ = 0;
    };

    [[nodiscard]] iterator begin() const { return {this, 0}; }
    [[nodiscard]] iterator end() const { return {this, spec_.n_configs}; }

private:
    BathSpec spec_;
    const SpinSystem* system_;
};

BathEnsemble ensemble(const BathSpec& spec, const SpinSystem& system);

/// XYZ dump of the molecule (if requested) followed by bath spins.
void write_xyz(std::ostream& out, const BathConfiguration& config, const BathSpec& spec,
               const SpinSystem* molecule = nullptr);

}  // namespace spinpair
