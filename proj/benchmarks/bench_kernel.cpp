#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "spinpair/bath.hpp"
#include "spinpair/couplings.hpp"
#include "spinpair/dephasing.hpp"
#include "spinpair/oracle.hpp"

namespace {

using namespace spinpair;

std::vector<PairContribution> random_contributions(std::size_t n) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> delta(-5.0, 5.0), b(-0.5, 0.5);
    std::vector<PairContribution> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        PairCoupling c;
        c.index_k = i;
        c.index_l = i + 1;
        c.delta = delta(rng);
        c.b = b(rng);
        c.pair_class = PairClass::SolventSolvent;
        out.push_back(make_contribution(c));
    }
    return out;
}

SpinSystem point_electron() {
    return SpinSystem(ElectronCenter{}, {}, {Atom{"X", Vec3::Zero()}});
}

void BM_SumW(benchmark::State& state) {
    const auto pairs = random_contributions(static_cast<std::size_t>(state.range(0)));
    const auto grid = TimeGrid::uniform(100.0, 1001);
    for (auto _ : state) benchmark::DoNotOptimize(sum_w(pairs, grid));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 1001);
}
BENCHMARK(BM_SumW)->Arg(1 << 10)->Arg(1 << 14);

void BM_BuildPairs(benchmark::State& state) {
    const auto system = point_electron();
    BathSpec spec;
    spec.density = 0.01 * static_cast<double>(state.range(0));
    spec.n_configs = 1;
    const auto config = sample_configuration(spec, system, 0);
    for (auto _ : state) benchmark::DoNotOptimize(build_pair_couplings(system, config));
    state.counters["bath_spins"] = static_cast<double>(config.positions.size());
}
BENCHMARK(BM_BuildPairs)->Arg(1)->Arg(4);

void BM_OracleSixNuclei(benchmark::State& state) {
    SmallSpinProblem p;
    p.a_list = {0.3, -0.1, 0.25, 0.05, -0.4, 0.12};
    p.b_matrix = Eigen::MatrixXd::Constant(6, 6, 0.02);
    p.b_matrix.diagonal().setZero();
    const auto grid = TimeGrid::uniform(50.0, 201);
    for (auto _ : state) benchmark::DoNotOptimize(hahn_echo_exact(p, grid));
}
BENCHMARK(BM_OracleSixNuclei);

}  // namespace

BENCHMARK_MAIN();
