#pragma once

// Exact Hahn-echo dynamics for one electron and at most six spin-1/2 nuclei.
//
//   H = sigma_z^e (x) sum_k A_k I_z^k + sum_{k<l} b_kl (I_x^k I_x^l + I_y^k I_y^l)
//
// sigma_z^e = 2 S_z, so the nuclear Hamiltonians conditioned on the electron
// state are H_pm = +/- sum_k A_k I_z^k + H_ff. With this normalization a
// single pair gives exactly 1 - W(t) of the pair kernel. The electron starts
// in (|up> + |down>)/sqrt(2), the nuclei maximally mixed; the sequence is
// free evolution t/2, ideal pi pulse, free evolution t/2.

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "spinpair/couplings.hpp"
#include "spinpair/dephasing.hpp"

namespace spinpair {

inline constexpr std::size_t kMaxOracleNuclei = 6;

struct SmallSpinProblem {
    std::vector<double> a_list;  // A_k, rad/us
    Eigen::MatrixXd b_matrix;    // b_kl, rad/us; symmetric, zero diagonal

    [[nodiscard]] std::size_t n_nuclei() const noexcept { return a_list.size(); }
    /// Throws InputError on shape/symmetry problems, CapacityError above six nuclei.
    void validate() const;
};

/// Molecular spins of a system as an oracle problem. Heteronuclear b_kl are
/// zero, matching the pair builder.
SmallSpinProblem problem_from_system(const SpinSystem& system);

/// Diagonalizes both conditioned Hamiltonians once; evaluates any time.
class HahnEchoPropagator {
public:
    explicit HahnEchoPropagator(const SmallSpinProblem& problem);

    /// |<S+>(t)| / |<S+>(0)|.
    [[nodiscard]] double coherence(double t) const;
    /// Trace of the full density matrix after the echo sequence.
    [[nodiscard]] double trace(double t) const;

private:
    Eigen::MatrixXd vec_up_, vec_down_;
    Eigen::VectorXd val_up_, val_down_;
    std::size_t dim_;
};

CoherenceCurve hahn_echo_exact(const SmallSpinProblem& problem, const TimeGrid& grid);

struct Tcl2Comparison {
    double max_abs_deviation = 0.0;
    std::vector<PairCoupling> pairs;  // every (k, l) with k < l
    CoherenceCurve exact;
    CoherenceCurve tcl2;
};

Tcl2Comparison compare_tcl2(const SmallSpinProblem& problem, const TimeGrid& grid);

}  // namespace spinpair
