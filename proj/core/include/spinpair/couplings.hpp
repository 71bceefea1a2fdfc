#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "spinpair/model.hpp"

namespace spinpair {

struct BathConfiguration;

enum class PairClass { Intramolecular = 0, MoleculeSolvent = 1, SolventSolvent = 2 };

std::string_view to_string(PairClass c);
/// Accepts "intra", "intramolecular", "molecule-solvent", "ms", "solvent-solvent", "ss".
PairClass parse_pair_class(std::string_view text);

/// One homonuclear pair. Spin ids number the molecular spins first
/// (0..M-1) followed by bath spins (M..M+N-1); index_k < index_l always.
struct PairCoupling {
    std::size_t index_k = 0;
    std::size_t index_l = 0;
    double b = 0.0;      // flip-flop amplitude, rad/us
    double delta = 0.0;  // A_k - A_l, rad/us
    double r_nn = 0.0;   // Angstrom
    PairClass pair_class = PairClass::Intramolecular;
};

/// Secular flip-flop amplitude
///   b = -(mu0/4pi) gamma_k gamma_l hbar / r^3 * (1 - 3 cos^2 theta) / 4
/// with theta between the internuclear vector and field_axis. In the
/// nuclear Hamiltonian b multiplies (I+_k I-_l + I-_k I+_l) / 2.
/// Throws DegenerateGeometry when the positions coincide.
double dipolar_b(const Vec3& pos_k, const Vec3& pos_l, double gamma_k, double gamma_l,
                 const Vec3& field_axis);

/// Point-dipole hyperfine z-component
///   A_zz = (mu0/4pi) gamma_e gamma_n hbar / r^3 * (3 cos^2 theta - 1).
/// Throws DegenerateGeometry when the positions coincide.
double point_dipole_azz(const Vec3& electron_pos, const Vec3& nucleus_pos, double gamma_n,
                        const Vec3& field_axis);

struct CouplingOptions {
    double cutoff_r = 8.0;        // Angstrom; +inf disables the cutoff
    double alpha2_floor = 1e-10;  // pairs with alpha^2 below this are dropped
};

/// All homonuclear pairs among molecular and bath spins, sorted by
/// (class, index_k, index_l). Intramolecular pairs are always kept; other
/// pairs are dropped beyond cutoff_r or below alpha2_floor. Bath spins take
/// the bath isotope and point-dipole hyperfine.
std::vector<PairCoupling> build_pair_couplings(const SpinSystem& system,
                                               const BathConfiguration& bath,
                                               const CouplingOptions& options = {});

/// Hyperfine values (rad/us) for the bath spins of a configuration.
std::vector<double> bath_hyperfine(const SpinSystem& system, const BathConfiguration& bath);

}  // namespace spinpair
