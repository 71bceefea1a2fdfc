#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "spinpair/bath.hpp"
#include "spinpair/error.hpp"

using namespace spinpair;

namespace {

SpinSystem methyl_like() {
    const Vec3 c(3, 0, 0);
    std::vector<Atom> atoms{{"C", c},
                            {"H", c + Vec3(1.09, 0, 0)},
                            {"H", c + Vec3(-0.36, 1.03, 0)},
                            {"H", c + Vec3(-0.36, -0.51, 0.89)}};
    return SpinSystem({Vec3::Zero()}, {}, atoms);
}

}  // namespace

TEST(SolventDensity, Toluene) {
    const double rho = density_from_solvent(0.867, 92.14, 8.0);
    EXPECT_NEAR(rho, 0.045332720112177115, 1e-15);
    EXPECT_NEAR(rho, 0.0453, 1e-4);
    EXPECT_EQ(density_from_solvent(0.867, 92.14, 8.0, 0.5), rho * 0.5);
    EXPECT_EQ(density_from_solvent(0.867, 92.14, 0.0), 0.0);
    EXPECT_THROW(density_from_solvent(0.0, 92.14, 8.0), InputError);
    EXPECT_THROW(density_from_solvent(0.867, -1.0, 8.0), InputError);
    EXPECT_THROW(density_from_solvent(0.867, 92.14, 8.0, 1.5), InputError);
}

TEST(BathSpec, Validation) {
    BathSpec s;
    EXPECT_NO_THROW(s.validate());
    s.box_edge = 0.0;
    EXPECT_THROW(s.validate(), InputError);
    s = {};
    s.density = -1.0;
    EXPECT_THROW(s.validate(), InputError);
    s = {};
    s.n_configs = 0;
    EXPECT_THROW(s.validate(), InputError);
}

TEST(SampleConfiguration, ZeroDensityIsEmpty) {
    BathSpec s;
    EXPECT_TRUE(sample_configuration(s, methyl_like(), 0).positions.empty());
}

TEST(SampleConfiguration, DeterministicAndSeedSensitive) {
    BathSpec s;
    s.density = 0.01;
    s.box_edge = 30.0;
    const auto sys = methyl_like();
    const auto a = sample_configuration(s, sys, 5);
    const auto b = sample_configuration(s, sys, 5);
    ASSERT_EQ(a.positions.size(), b.positions.size());
    for (std::size_t i = 0; i < a.positions.size(); ++i) EXPECT_EQ(a.positions[i], b.positions[i]);
    EXPECT_EQ(a.config_index, 5u);

    const auto other_index = sample_configuration(s, sys, 6);
    EXPECT_NE(other_index.positions.front(), a.positions.front());
    s.seed = 1;
    const auto other_seed = sample_configuration(s, sys, 5);
    EXPECT_NE(other_seed.positions.front(), a.positions.front());
}

TEST(SampleConfiguration, InsideBoxAndOutsideExclusion) {
    BathSpec s;
    s.density = 0.05;
    s.box_edge = 20.0;
    s.exclusion_radius = 1.5;
    const auto sys = methyl_like();
    for (std::size_t i = 0; i < 20; ++i) {
        const auto conf = sample_configuration(s, sys, i);
        for (const auto& p : conf.positions) {
            EXPECT_LE((p - sys.electron().position).cwiseAbs().maxCoeff(), s.box_edge / 2.0);
            for (const auto& atom : sys.molecular_atoms()) {
                EXPECT_GE((p - atom.position).norm(), s.exclusion_radius);
            }
        }
    }
}

TEST(BathEnsemble, SizeOrderIndependenceAndDistinctStreams) {
    BathSpec s;
    s.density = 0.002;
    s.box_edge = 30.0;
    s.n_configs = 1000;
    const auto sys = methyl_like();
    const auto ens = ensemble(s, sys);
    EXPECT_EQ(ens.size(), 1000u);

    std::set<std::pair<double, double>> firsts;
    std::size_t n = 0;
    for (const auto& conf : ens) {
        ++n;
        if (!conf.positions.empty()) firsts.insert({conf.positions[0].x(), conf.positions[0].y()});
    }
    EXPECT_EQ(n, 1000u);
    EXPECT_GT(firsts.size(), 990u);

    // Reverse-order generation reproduces the same configurations.
    for (std::size_t i = 1000; i-- > 990;) {
        const auto conf = ens[i];
        const auto again = sample_configuration(s, sys, i);
        EXPECT_EQ(conf.positions, again.positions);
    }

    s.n_configs = 1;
    EXPECT_EQ(ensemble(s, sys).size(), 1u);
}

TEST(BathEnsemble, PoissonMeanCount) {
    BathSpec s;
    s.density = 0.004;
    s.box_edge = 25.0;
    s.exclusion_radius = 0.0;
    const SpinSystem empty({}, {}, {});
    const double mean = s.density * std::pow(s.box_edge, 3);
    double total = 0.0;
    for (std::size_t i = 0; i < 1000; ++i) total += sample_configuration(s, empty, i).positions.size();
    const double sigma = std::sqrt(mean / 1000.0);
    EXPECT_LE(std::abs(total / 1000.0 - mean), 3.0 * sigma);
}

TEST(WriteXyz, MoleculeThenBath) {
    BathSpec s;
    s.density = 0.01;
    s.box_edge = 10.0;
    const auto sys = methyl_like();
    const auto conf = sample_configuration(s, sys, 0);
    std::ostringstream out;
    write_xyz(out, conf, s, &sys);
    std::istringstream in(out.str());
    std::size_t count = 0;
    in >> count;
    EXPECT_EQ(count, conf.positions.size() + sys.molecular_atoms().size());
}
