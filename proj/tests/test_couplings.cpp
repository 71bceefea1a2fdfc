#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <limits>
#include <random>

#include "spinpair/bath.hpp"
#include "spinpair/couplings.hpp"
#include "spinpair/error.hpp"

using namespace spinpair;

namespace {

const double kMagic = std::acos(1.0 / std::sqrt(3.0));
const double gH = constants::gamma_1h;

Vec3 polar(double r, double theta) { return {r * std::sin(theta), 0.0, r * std::cos(theta)}; }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

SpinSystem molecule(const std::vector<Vec3>& positions, const std::vector<std::string>& isotopes,
                    Vec3 electron = Vec3::Zero()) {
    std::vector<Atom> atoms;
    std::vector<NuclearSpin> spins;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        atoms.push_back({"H", positions[i]});
        spins.push_back(point_dipole_spin({electron}, positions[i], isotopes[i], Vec3::UnitZ()));
    }
    return SpinSystem({electron}, spins, atoms);
}

}  // namespace

TEST(DipolarB, TwoProtonsAtTwoAngstrom) {
    // Independent evaluation: mu0/4pi * gamma_H^2 * hbar / (2 A)^3.
    constexpr double base = 94342.15400504222;  // rad/s
    const double b = dipolar_b(Vec3::Zero(), Vec3(0, 0, 2), gH, gH, Vec3::UnitZ());
    EXPECT_NEAR(units::to_rad_per_s(b), base / 2.0, 1e-9 * base);
    EXPECT_NEAR(units::to_rad_per_s(b), 4.7e4, 0.05e4);
}

TEST(DipolarB, MagicAngleVanishes) {
    for (double r : {1.0, 2.5, 7.0}) {
        const double ref = std::abs(dipolar_b(Vec3::Zero(), polar(r, 0.0), gH, gH, Vec3::UnitZ()));
        const double b = dipolar_b(Vec3::Zero(), polar(r, kMagic), gH, gH, Vec3::UnitZ());
        EXPECT_LE(std::abs(b), 1e-12 * ref);
    }
}

TEST(DipolarB, InverseCube) {
    const Vec3 axis = Vec3(1, 2, 2).normalized();
    const Vec3 d(0.3, -1.1, 2.0);
    const double b1 = dipolar_b(Vec3::Zero(), d, gH, gH, axis);
    const double b2 = dipolar_b(Vec3::Zero(), 2.0 * d, gH, gH, axis);
    EXPECT_NEAR(b2, b1 / 8.0, 1e-12 * std::abs(b1));
}

TEST(DipolarB, CoincidentPositionsThrow) {
    EXPECT_THROW(dipolar_b(Vec3(1, 1, 1), Vec3(1, 1, 1), gH, gH, Vec3::UnitZ()), DegenerateGeometry);
}

TEST(PointDipole, ProtonAtFiveAngstrom) {
    constexpr double expected = 7948417.802942364;  // rad/s, independent evaluation
    const double a = point_dipole_azz(Vec3::Zero(), Vec3(0, 0, 5), gH, Vec3::UnitZ());
    EXPECT_NEAR(units::to_rad_per_s(a), expected, 1e-9 * expected);
    EXPECT_NEAR(units::to_rad_per_s(a), 7.9e6, 0.05e6);
}

TEST(PointDipole, MagicAngleAndScaling) {
    const double ref = point_dipole_azz(Vec3::Zero(), polar(4.0, 0.0), gH, Vec3::UnitZ());
    EXPECT_LE(std::abs(point_dipole_azz(Vec3::Zero(), polar(4.0, kMagic), gH, Vec3::UnitZ())),
              1e-12 * ref);
    const double a1 = point_dipole_azz(Vec3::Zero(), polar(3.0, 0.4), gH, Vec3::UnitZ());
    const double a2 = point_dipole_azz(Vec3::Zero(), polar(6.0, 0.4), gH, Vec3::UnitZ());
    EXPECT_NEAR(a2, a1 / 8.0, 1e-12 * std::abs(a1));
    EXPECT_THROW(point_dipole_azz(Vec3::Zero(), Vec3::Zero(), gH, Vec3::UnitZ()), DegenerateGeometry);
}

TEST(CouplingProperties, ExchangeTranslationRotation) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec3 p(g(rng), g(rng), g(rng)), q(g(rng), g(rng), g(rng)), shift(g(rng), g(rng), g(rng));
        const Vec3 axis = Vec3(g(rng), g(rng), g(rng)).normalized();
        const Eigen::Quaterniond rot = Eigen::Quaterniond::UnitRandom();
        const auto R = rot.toRotationMatrix();

        const double b = dipolar_b(p, q, gH, gH, axis);
        EXPECT_EQ(b, dipolar_b(q, p, gH, gH, axis));
        EXPECT_LE(rel(b, dipolar_b(p + shift, q + shift, gH, gH, axis)), 1e-12);
        EXPECT_LE(rel(b, dipolar_b(R * p, R * q, gH, gH, R * axis)), 1e-12);

        const double a = point_dipole_azz(p, q, gH, axis);
        EXPECT_LE(rel(a, point_dipole_azz(p + shift, q + shift, gH, axis)), 1e-12);
        EXPECT_LE(rel(a, point_dipole_azz(R * p, R * q, gH, R * axis)), 1e-12);
    }
}

TEST(PairClass, NamesRoundTrip) {
    for (auto c : {PairClass::Intramolecular, PairClass::MoleculeSolvent, PairClass::SolventSolvent}) {
        EXPECT_EQ(parse_pair_class(to_string(c)), c);
    }
    EXPECT_EQ(parse_pair_class("ms"), PairClass::MoleculeSolvent);
    EXPECT_THROW(parse_pair_class("bogus"), InputError);
}

TEST(BuildPairs, ThreeProtonsEmptyBath) {
    const auto s = molecule({Vec3(5, 0, 0), Vec3(5, 1.8, 0), Vec3(5, 0.9, 1.5)}, {"1H", "1H", "1H"});
    const auto pairs = build_pair_couplings(s, {});
    ASSERT_EQ(pairs.size(), 3u);
    for (const auto& p : pairs) {
        EXPECT_EQ(p.pair_class, PairClass::Intramolecular);
        EXPECT_LT(p.index_k, p.index_l);
        EXPECT_GT(p.r_nn, 0.0);
    }
}

TEST(BuildPairs, FluorineMoleculeHasNoSolventPairs) {
    const auto s = molecule({Vec3(4, 0, 0)}, {"19F"});
    BathConfiguration bath;
    bath.positions = {Vec3(5, 0, 0), Vec3(4, 1.5, 0), Vec3(4, 0, 2)};
    const auto pairs = build_pair_couplings(s, bath);
    for (const auto& p : pairs) EXPECT_NE(p.pair_class, PairClass::MoleculeSolvent);
    EXPECT_EQ(pairs.size(), 3u);  // only solvent-solvent
}

TEST(BuildPairs, CutoffDropsDistantSolventPair) {
    const SpinSystem s({}, {}, {});
    BathConfiguration bath;
    bath.positions = {Vec3(10, 0, 0), Vec3(10, 0, 9)};
    CouplingOptions opts;
    opts.cutoff_r = 8.0;
    opts.alpha2_floor = 0.0;
    EXPECT_TRUE(build_pair_couplings(s, bath, opts).empty());
    opts.cutoff_r = 10.0;
    EXPECT_EQ(build_pair_couplings(s, bath, opts).size(), 1u);
}

TEST(BuildPairs, IntramolecularKeptBeyondCutoff) {
    const auto s = molecule({Vec3(3, 0, 0), Vec3(-9, 0, 0)}, {"1H", "1H"});
    CouplingOptions opts;
    opts.cutoff_r = 2.0;
    opts.alpha2_floor = 0.5;
    EXPECT_EQ(build_pair_couplings(s, {}, opts).size(), 1u);
}

TEST(BuildPairs, UnboundedMatchesBruteForceCount) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    std::vector<Vec3> pos;
    std::vector<std::string> iso;
    for (int i = 0; i < 12; ++i) {
        pos.emplace_back(u(rng) + 20.0, u(rng), u(rng));
        iso.push_back(i % 3 == 0 ? "19F" : "1H");
    }
    const auto s = molecule(pos, iso);
    BathConfiguration bath;
    for (int i = 0; i < 40; ++i) bath.positions.emplace_back(u(rng), u(rng) + 20.0, u(rng));
    CouplingOptions opts;
    opts.cutoff_r = std::numeric_limits<double>::infinity();
    opts.alpha2_floor = 0.0;
    const std::size_t n_h = 8 + 40, n_f = 4;
    EXPECT_EQ(build_pair_couplings(s, bath, opts).size(), n_h * (n_h - 1) / 2 + n_f * (n_f - 1) / 2);
}

TEST(BuildPairs, GridSearchMatchesBruteForce) {
    const SpinSystem s({}, {}, {{"X", Vec3::Zero()}});
    BathSpec spec;
    spec.box_edge = 30.0;
    spec.density = 0.03;
    const auto bath = sample_configuration(spec, s, 3);
    CouplingOptions opts;
    opts.alpha2_floor = 0.0;
    opts.cutoff_r = 4.0;
    const auto pairs = build_pair_couplings(s, bath, opts);
    std::size_t expected = 0;
    for (std::size_t i = 0; i < bath.positions.size(); ++i) {
        for (std::size_t j = i + 1; j < bath.positions.size(); ++j) {
            if ((bath.positions[i] - bath.positions[j]).norm() <= 4.0) ++expected;
        }
    }
    EXPECT_EQ(pairs.size(), expected);
    EXPECT_TRUE(std::is_sorted(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        return std::tie(a.pair_class, a.index_k, a.index_l) < std::tie(b.pair_class, b.index_k, b.index_l);
    }));
}

TEST(BuildPairs, BathHyperfineUsesPointDipole) {
    const SpinSystem s({Vec3(1, 1, 1)}, {}, {});
    BathConfiguration bath;
    bath.positions = {Vec3(1, 1, 6)};
    const auto a = bath_hyperfine(s, bath);
    ASSERT_EQ(a.size(), 1u);
    EXPECT_DOUBLE_EQ(a[0], point_dipole_azz(Vec3(1, 1, 1), Vec3(1, 1, 6), gH, Vec3::UnitZ()));
}
