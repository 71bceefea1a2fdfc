#include "spinpair/oracle.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "spinpair/error.hpp"

namespace spinpair {

void SmallSpinProblem::validate() const {
    const auto n = a_list.size();
    if (n > kMaxOracleNuclei) {
        throw CapacityError("exact propagation supports at most " +
                            std::to_string(kMaxOracleNuclei) + " nuclei, got " + std::to_string(n));
    }
    if (b_matrix.rows() != static_cast<Eigen::Index>(n) ||
        b_matrix.cols() != static_cast<Eigen::Index>(n)) {
        throw InputError("b_matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(a_list[k])) throw InputError("non-finite hyperfine value");
        if (b_matrix(k, k) != 0.0) throw InputError("b_matrix diagonal must be zero");
        for (std::size_t l = k + 1; l < n; ++l) {
            if (b_matrix(k, l) != b_matrix(l, k)) throw InputError("b_matrix must be symmetric");
            if (!std::isfinite(b_matrix(k, l))) throw InputError("non-finite b_matrix entry");
        }
    }
}

SmallSpinProblem problem_from_system(const SpinSystem& system) {
    const auto& spins = system.molecular_spins();
    const auto n = spins.size();
    if (n > kMaxOracleNuclei) {
        throw CapacityError("system has " + std::to_string(n) + " molecular spins; the exact " +
                            "propagator handles at most " + std::to_string(kMaxOracleNuclei));
    }
    SmallSpinProblem problem;
    problem.b_matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        problem.a_list.push_back(spins[k].a_zz);
        for (std::size_t l = k + 1; l < n; ++l) {
            if (spins[k].isotope != spins[l].isotope) continue;
            const double b = dipolar_b(spins[k].position, spins[l].position, spins[k].gamma,
                                       spins[l].gamma, system.field_axis());
            problem.b_matrix(k, l) = b;
            problem.b_matrix(l, k) = b;
        }
    }
    return problem;
}

namespace {

// Nuclear Hamiltonian for electron sign +1 / -1. Basis bit k set means
// nucleus k is down (m = -1/2).
Eigen::MatrixXd conditioned_hamiltonian(const SmallSpinProblem& p, double electron_sign) {
    const std::size_t n = p.n_nuclei();
    const std::size_t dim = std::size_t{1} << n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double m = (s >> k & 1u) ? -0.5 : 0.5;
            diag += p.a_list[k] * m;
        }
        h(s, s) = electron_sign * diag;
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t l = k + 1; l < n; ++l) {
                if (((s >> k) & 1u) == ((s >> l) & 1u)) continue;
                const std::size_t t = s ^ ((std::size_t{1} << k) | (std::size_t{1} << l));
                h(t, s) += 0.5 * p.b_matrix(k, l);
            }
        }
    }
    return h;
}

Eigen::MatrixXcd propagator(const Eigen::MatrixXd& vecs, const Eigen::VectorXd& vals, double tau) {
    const Eigen::Index dim = vals.size();
    Eigen::VectorXcd phases(dim);
    for (Eigen::Index i = 0; i < dim; ++i) phases(i) = std::polar(1.0, -vals(i) * tau);
    const Eigen::MatrixXcd v = vecs.cast<std::complex<double>>();
    return v * phases.asDiagonal() * v.adjoint();
}

}  // namespace

HahnEchoPropagator::HahnEchoPropagator(const SmallSpinProblem& problem) {
    problem.validate();
    dim_ = std::size_t{1} << problem.n_nuclei();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> up(conditioned_hamiltonian(problem, +1.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> down(conditioned_hamiltonian(problem, -1.0));
    if (up.info() != Eigen::Success || down.info() != Eigen::Success) {
        throw NumericError("eigendecomposition of the nuclear Hamiltonian failed");
    }
    vec_up_ = up.eigenvectors();
    val_up_ = up.eigenvalues();
    vec_down_ = down.eigenvectors();
    val_down_ = down.eigenvalues();
}

double HahnEchoPropagator::coherence(double t) const {
    const double tau = 0.5 * t;
    const Eigen::MatrixXcd u_up = propagator(vec_up_, val_up_, tau);
    const Eigen::MatrixXcd u_down = propagator(vec_down_, val_down_, tau);
    // Branch starting in |up> is flipped by the pi pulse halfway through.
    const Eigen::MatrixXcd from_up = u_down * u_up;
    const Eigen::MatrixXcd from_down = u_up * u_down;
    const std::complex<double> overlap = (from_down.adjoint() * from_up).trace();
    return std::abs(overlap) / static_cast<double>(dim_);
}

double HahnEchoPropagator::trace(double t) const {
    const double tau = 0.5 * t;
    const Eigen::MatrixXcd u_up = propagator(vec_up_, val_up_, tau);
    const Eigen::MatrixXcd u_down = propagator(vec_down_, val_down_, tau);
    const Eigen::MatrixXcd from_up = u_down * u_up;
    const Eigen::MatrixXcd from_down = u_up * u_down;
    const double d = static_cast<double>(dim_);
    return 0.5 * ((from_up * from_up.adjoint()).trace().real() +
                  (from_down * from_down.adjoint()).trace().real()) /
           d;
}

CoherenceCurve hahn_echo_exact(const SmallSpinProblem& problem, const TimeGrid& grid) {
    const HahnEchoPropagator echo(problem);
    CoherenceCurve curve;
    curve.times = grid.times();
    curve.values.reserve(grid.size());
    for (double t : grid.times()) curve.values.push_back(echo.coherence(t));
    return curve;
}

Tcl2Comparison compare_tcl2(const SmallSpinProblem& problem, const TimeGrid& grid) {
    problem.validate();
    Tcl2Comparison report;
    const std::size_t n = problem.n_nuclei();
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = k + 1; l < n; ++l) {
            PairCoupling p;
            p.index_k = k;
            p.index_l = l;
            p.b = problem.b_matrix(k, l);
            p.delta = problem.a_list[k] - problem.a_list[l];
            p.r_nn = std::numeric_limits<double>::quiet_NaN();  // no geometry
            report.pairs.push_back(p);
        }
    }
    report.exact = hahn_echo_exact(problem, grid);
    const auto contributions = make_contributions(report.pairs);
    report.tcl2 = coherence_curve(contributions, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        report.max_abs_deviation =
            std::max(report.max_abs_deviation, std::abs(report.exact.values[i] - report.tcl2.values[i]));
    }
    return report;
}

}  // namespace spinpair
