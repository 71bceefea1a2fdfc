#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spinpair/error.hpp"
#include "spinpair/oracle.hpp"

using namespace spinpair;

namespace {

SmallSpinProblem problem(std::vector<double> a, Eigen::MatrixXd b) { return {std::move(a), std::move(b)}; }

SmallSpinProblem pair_problem(double delta, double b) {
    Eigen::MatrixXd m(2, 2);
    m << 0.0, b, b, 0.0;
    return problem({0.2 + delta / 2.0, 0.2 - delta / 2.0}, m);
}

}  // namespace

TEST(SmallSpinProblem, Validation) {
    EXPECT_NO_THROW(pair_problem(1.0, 0.1).validate());
    EXPECT_THROW(problem(std::vector<double>(7, 0.1), Eigen::MatrixXd::Zero(7, 7)).validate(), CapacityError);
    Eigen::MatrixXd asym(2, 2);
    asym << 0.0, 0.1, 0.2, 0.0;
    EXPECT_THROW(problem({0.1, 0.2}, asym).validate(), InputError);
    Eigen::MatrixXd diag(2, 2);
    diag << 0.3, 0.1, 0.1, 0.0;
    EXPECT_THROW(problem({0.1, 0.2}, diag).validate(), InputError);
    EXPECT_THROW(problem({0.1, 0.2}, Eigen::MatrixXd::Zero(3, 3)).validate(), InputError);
}

TEST(HahnEcho, NoFlipFlopsRefocuses) {
    const auto p = problem({0.7, -0.3, 1.9}, Eigen::MatrixXd::Zero(3, 3));
    const auto c = hahn_echo_exact(p, TimeGrid::uniform(50.0, 101));
    for (double v : c.values) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(HahnEcho, NoHyperfineRefocuses) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Constant(3, 3, 0.4);
    b.diagonal().setZero();
    const auto p = problem({0.0, 0.0, 0.0}, b);
    const auto c = hahn_echo_exact(p, TimeGrid::uniform(50.0, 101));
    for (double v : c.values) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(HahnEcho, TwoSpinsEqualOneMinusW) {
    // For a single pair the exact echo is 1 - W, which the pair product
    // approximates as exp(-W).
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        const double delta = u(rng), b = u(rng);
        const HahnEchoPropagator prop(pair_problem(delta, b));
        for (double t : {0.0, 0.37, 1.5, 4.0, 11.0}) {
            EXPECT_NEAR(prop.coherence(t), 1.0 - w_of_t(t, delta, b), 1e-10);
        }
    }
}

TEST(HahnEcho, BoundedAndTracePreserved) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 5;
    std::vector<double> a(n);
    for (auto& x : a) x = u(rng);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = k + 1; l < n; ++l) b(k, l) = b(l, k) = 0.3 * u(rng);
    }
    const HahnEchoPropagator prop(problem(a, b));
    EXPECT_NEAR(prop.coherence(0.0), 1.0, 1e-12);
    for (double t = 0.0; t < 40.0; t += 0.7) {
        const double c = prop.coherence(t);
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, 1.0 + 1e-12);
        EXPECT_NEAR(prop.trace(t), 1.0, 1e-10);
    }
}

TEST(CompareTcl2, ZeroCouplingHasNoDeviation) {
    const auto p = problem({0.0, 0.0, 0.0}, Eigen::MatrixXd::Zero(3, 3));
    const auto r = compare_tcl2(p, TimeGrid::uniform(10.0, 51));
    EXPECT_LE(r.max_abs_deviation, 1e-10);
    EXPECT_EQ(r.pairs.size(), 3u);
}

TEST(CompareTcl2, StrongPairDeviates) {
    const auto r = compare_tcl2(pair_problem(0.5, 0.5), TimeGrid::uniform(4.0 * 3.14159 / 0.5, 401));
    // exp(-1) against 0 at the first maximum.
    EXPECT_GT(r.max_abs_deviation, 0.3);
}

TEST(CompareTcl2, WeakPairWithinTolerance) {
    // alpha2 about 0.1.
    const double b = 1.0, delta = 2.0 * b / std::sqrt(0.1) - b * std::sqrt(0.1) / 2.0;
    const auto p = pair_problem(delta, b);
    const double period = 2.0 * 3.141592653589793 / std::hypot(delta, b);
    const auto r = compare_tcl2(p, TimeGrid::uniform(period, 201));
    EXPECT_LE(r.max_abs_deviation, 1e-2);
}

TEST(CompareTcl2, ThreeWeakNuclei) {
    Eigen::MatrixXd b(3, 3);
    b << 0.0, 0.01, 0.004, 0.01, 0.0, 0.006, 0.004, 0.006, 0.0;
    const auto p = problem({0.5, 0.1, -0.3}, b);
    const auto r = compare_tcl2(p, TimeGrid::uniform(100.0, 501));
    EXPECT_LE(r.max_abs_deviation, 1e-2);
}
