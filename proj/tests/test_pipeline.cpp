#include <gtest/gtest.h>

#include <cmath>

#include "spinpair/error.hpp"
#include "spinpair/pipeline.hpp"

using namespace spinpair;

namespace {

SpinSystem two_protons(const Vec3& electron = Vec3(0, 0, 0)) {
    const Vec3 p1(4.0, 0.0, 1.0), p2(4.0, 1.8, 1.0);
    return SpinSystem({electron},
                      {point_dipole_spin({electron}, p1, "1H", Vec3::UnitZ()),
                       point_dipole_spin({electron}, p2, "1H", Vec3::UnitZ())},
                      {{"H", p1}, {"H", p2}});
}

// Three protons on a ring of radius 0.9 A, centered `distance` from the electron.
SpinSystem ring_at(double distance) {
    const ElectronCenter e{Vec3::Zero()};
    std::vector<Atom> atoms;
    std::vector<NuclearSpin> spins;
    for (int k = 0; k < 3; ++k) {
        const double phi = 2.0 * 3.141592653589793 * k / 3.0;
        const Vec3 p(distance + 0.9 * std::cos(phi), 0.9 * std::sin(phi), 0.0);
        atoms.push_back({"H", p});
        spins.push_back(point_dipole_spin(e, p, "1H", Vec3(1, 1, 1).normalized()));
    }
    return SpinSystem(e, spins, atoms, Vec3(1, 1, 1).normalized());
}

}  // namespace

TEST(Simulate, IsolatedMoleculeIsClosedForm) {
    const auto sys = two_protons();
    SimulationOptions opts;
    opts.grid = TimeGrid::uniform(200.0, 801);
    const auto r = simulate(sys, std::nullopt, opts);
    EXPECT_EQ(r.n_configs, 1u);
    EXPECT_EQ(r.mean_pair_count, 1.0);
    const auto& s = sys.molecular_spins();
    const double delta = s[0].a_zz - s[1].a_zz;
    const double b = dipolar_b(s[0].position, s[1].position, s[0].gamma, s[1].gamma, Vec3::UnitZ());
    for (std::size_t i = 0; i < r.coherence.times.size(); ++i) {
        EXPECT_NEAR(r.coherence.values[i], std::exp(-w_of_t(r.coherence.times[i], delta, b)), 1e-12);
    }
    BathSpec zero;
    zero.density = 0.0;
    EXPECT_EQ(simulate(sys, zero, opts).coherence.values, r.coherence.values);
}

TEST(Simulate, WorkerCountInvariant) {
    const auto sys = two_protons();
    BathSpec bath;
    bath.density = 0.02;
    bath.box_edge = 24.0;
    bath.n_configs = 12;
    bath.seed = 99;
    SimulationOptions opts;
    opts.grid = TimeGrid::uniform(50.0, 201);
    opts.workers = 1;
    const auto one = simulate(sys, bath, opts);
    for (std::size_t w : {2u, 4u, 5u}) {
        opts.workers = w;
        EXPECT_EQ(simulate(sys, bath, opts).coherence.values, one.coherence.values);
    }
    EXPECT_GT(one.mean_pair_count, 1.0);
}

TEST(Simulate, OrientationAveraging) {
    const auto axes = orientation_axes(Vec3::UnitZ(), 16);
    ASSERT_EQ(axes.size(), 16u);
    for (const auto& a : axes) {
        EXPECT_NEAR(a.norm(), 1.0, 1e-12);
        EXPECT_GT(a.z(), 0.0);
    }
    EXPECT_THROW(orientation_axes(Vec3::UnitZ(), 0), InputError);

    SimulationOptions opts;
    opts.grid = TimeGrid::uniform(100.0, 101);
    opts.orientations = 8;
    const auto r = simulate(two_protons(), std::nullopt, opts);
    EXPECT_EQ(r.n_orientations, 8u);
    EXPECT_EQ(r.coherence.values[0], 1.0);
}

TEST(Simulate, ClassFilterRestricts) {
    const auto sys = two_protons();
    BathSpec bath;
    bath.density = 0.02;
    bath.box_edge = 20.0;
    bath.n_configs = 3;
    SimulationOptions opts;
    opts.grid = TimeGrid::uniform(50.0, 101);
    opts.class_filter = ClassSet::only(PairClass::Intramolecular);
    const auto filtered = simulate(sys, bath, opts);
    const auto isolated = simulate(sys, std::nullopt, opts);
    for (std::size_t i = 0; i < filtered.coherence.values.size(); ++i) {
        EXPECT_NEAR(filtered.coherence.values[i], isolated.coherence.values[i], 1e-15);
    }
}

TEST(DensitySweep, SingleFactorAndValidation) {
    const SpinSystem sys({}, {}, {{"X", Vec3::Zero()}});
    BathSpec bath;
    bath.density = 0.03;
    bath.box_edge = 30.0;
    bath.n_configs = 4;
    SimulationOptions opts;
    opts.grid = TimeGrid::uniform(200.0, 401);
    const std::vector<double> one{1.0};
    const auto r = density_sweep(sys, bath, one, opts);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_GT(r[0].t2.t2, 0.0);
    const std::vector<double> bad{1.0, 1.5};
    EXPECT_THROW(density_sweep(sys, bath, bad, opts), InputError);
    EXPECT_THROW(density_sweep(sys, bath, std::vector<double>{}, opts), InputError);
}

TEST(DensitySweep, VanishingBathLeavesWeakFloor) {
    const auto sys = two_protons();
    BathSpec bath;
    bath.density = 0.03;
    bath.box_edge = 30.0;
    bath.n_configs = 2;
    SimulationOptions opts;
    opts.grid = TimeGrid::uniform(100.0, 201);
    const std::vector<double> tiny{1e-9};
    EXPECT_THROW(density_sweep(sys, bath, tiny, opts), InsufficientDecay);
}

TEST(DistanceProfile, EnsembleGroupValidation) {
    const auto sys = two_protons();
    BathSpec bath;
    bath.density = 0.02;
    bath.box_edge = 20.0;
    bath.n_configs = 3;
    EXPECT_THROW(ensemble_distance_profile(sys, bath, {}, {5}, 0.5), InputError);
    const auto p = ensemble_distance_profile(sys, bath, {}, {0, 1}, 0.5);
    std::size_t total = 0;
    for (auto c : p.counts) total += c;
    EXPECT_GT(total, 0u);
}

TEST(DistanceProfile, FartherGroupHasDeeperSolventModulation) {
    // Moving the molecular spins away from the electron weakens the
    // hyperfine gradient that detunes their flip-flops with the solvent.
    BathSpec bath;
    bath.density = 0.04;
    bath.box_edge = 40.0;
    bath.n_configs = 40;
    CouplingOptions coupling;
    coupling.alpha2_floor = 0.0;
    const auto near = ensemble_distance_profile(ring_at(5.0), bath, coupling, {0, 1, 2}, 1.0);
    const auto far = ensemble_distance_profile(ring_at(9.0), bath, coupling, {0, 1, 2}, 1.0);
    std::size_t compared = 0;
    for (std::size_t i = 0; i < std::min(near.counts.size(), far.counts.size()); ++i) {
        if (near.counts[i] < 20 || far.counts[i] < 20) continue;
        ++compared;
        EXPECT_GT(far.mean_alpha2[i], near.mean_alpha2[i]) << "bin " << near.bin_centers[i];
    }
    EXPECT_GE(compared, 4u);
}
