#pragma once

// End-to-end coherence simulation: bath ensemble -> couplings -> pair
// kernel -> ensemble average.

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "spinpair/analysis.hpp"
#include "spinpair/bath.hpp"
#include "spinpair/couplings.hpp"
#include "spinpair/dephasing.hpp"

namespace spinpair {

struct SimulationOptions {
    TimeGrid grid = TimeGrid::uniform(100.0, 1001);
    CouplingOptions coupling;
    std::optional<ClassSet> class_filter;
    std::size_t workers = 1;       // 0: hardware concurrency
    std::size_t orientations = 1;  // >1 averages over quasi-uniform field axes
};

struct SimulationResult {
    CoherenceCurve coherence;
    std::size_t n_configs = 0;       // bath configurations averaged (1 without bath)
    std::size_t n_orientations = 1;
    double mean_pair_count = 0.0;    // per configuration and orientation
};

/// Pair contributions of one bath configuration (empty bath allowed).
std::vector<PairContribution> configuration_contributions(const SpinSystem& system,
                                                          const BathConfiguration& bath,
                                                          const CouplingOptions& options);

/// Averaged coherence. Without a bath, or with density 0, only the
/// molecule's own pairs enter and a single curve is produced.
SimulationResult simulate(const SpinSystem& system, const std::optional<BathSpec>& bath,
                          const SimulationOptions& options);

/// Field axes used for orientation averaging: the system axis for n = 1,
/// otherwise a Fibonacci lattice on the upper hemisphere.
std::vector<Vec3> orientation_axes(const Vec3& field_axis, std::size_t n);

struct SweepPoint {
    double factor = 1.0;
    T2Result t2;
    CoherenceCurve coherence;
};

/// Runs the pipeline with density scaled by each factor, same seed and
/// settings otherwise. Errors from any run propagate.
std::vector<SweepPoint> density_sweep(const SpinSystem& system, const BathSpec& bath_template,
                                      std::span<const double> factors,
                                      const SimulationOptions& options,
                                      T2Method method = T2Method::OneOverE);

/// Distance profile accumulated over every configuration of the ensemble.
DistanceProfile ensemble_distance_profile(const SpinSystem& system, const BathSpec& bath,
                                          const CouplingOptions& coupling,
                                          const std::set<std::size_t>& group, double bin_width,
                                          std::size_t workers = 1);

}  // namespace spinpair
