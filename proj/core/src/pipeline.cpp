#include "spinpair/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spinpair/error.hpp"
#include "spinpair/parallel.hpp"

namespace spinpair {

std::vector<PairContribution> configuration_contributions(const SpinSystem& system,
                                                          const BathConfiguration& bath,
                                                          const CouplingOptions& options) {
    const auto couplings = build_pair_couplings(system, bath, options);
    return make_contributions(couplings);
}

std::vector<Vec3> orientation_axes(const Vec3& field_axis, std::size_t n) {
    if (n == 0) throw InputError("orientation count must be at least 1");
    if (n == 1) return {field_axis.normalized()};
    // Couplings depend on cos^2 only, so the upper hemisphere suffices;
    // uniform spacing in z gives equal solid angle per direction.
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<Vec3> axes;
    axes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        const double r = std::sqrt(1.0 - z * z);
        const double phi = golden * static_cast<double>(i);
        axes.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
        axes.back().normalize();
    }
    return axes;
}

namespace {

struct Task {
    std::size_t config = 0;
    std::size_t orientation = 0;
};

}  // namespace

SimulationResult simulate(const SpinSystem& system, const std::optional<BathSpec>& bath,
                          const SimulationOptions& options) {
    if (bath) bath->validate();
    const bool has_bath = bath && bath->density > 0.0;
    const std::size_t n_configs = has_bath ? bath->n_configs : 1;
    const auto axes = orientation_axes(system.field_axis(), options.orientations);

    std::vector<SpinSystem> oriented;
    oriented.reserve(axes.size());
    if (axes.size() == 1) {
        oriented.push_back(system);
    } else {
        for (const auto& axis : axes) oriented.push_back(system.with_field_axis(axis));
    }

    const std::size_t n_tasks = n_configs * oriented.size();
    const std::size_t workers = resolve_workers(options.workers);
    // With a single task, parallelism moves into the pair sum.
    const std::size_t inner_workers = n_tasks == 1 ? workers : 1;
    const std::size_t batch = std::max<std::size_t>(16, 4 * workers);

    EnsembleAccumulator accumulator;
    double pair_total = 0.0;
    std::vector<CoherenceCurve> curves;
    std::vector<std::size_t> pair_counts;
    for (std::size_t first = 0; first < n_tasks; first += batch) {
        const std::size_t count = std::min(batch, n_tasks - first);
        curves.assign(count, {});
        pair_counts.assign(count, 0);
        parallel_for(count, workers, [&](std::size_t j) {
            const std::size_t task = first + j;
            const Task t{task / oriented.size(), task % oriented.size()};
            const auto config = has_bath ? sample_configuration(*bath, system, t.config)
                                         : BathConfiguration{};
            const auto contributions =
                configuration_contributions(oriented[t.orientation], config, options.coupling);
            pair_counts[j] = contributions.size();
            curves[j] = coherence_curve(contributions, options.grid, options.class_filter,
                                        inner_workers);
        });
        for (std::size_t j = 0; j < count; ++j) {
            accumulator.add(curves[j]);
            pair_total += static_cast<double>(pair_counts[j]);
        }
    }

    SimulationResult result;
    result.coherence = accumulator.mean();
    result.n_configs = n_configs;
    result.n_orientations = oriented.size();
    result.mean_pair_count = pair_total / static_cast<double>(n_tasks);
    return result;
}

std::vector<SweepPoint> density_sweep(const SpinSystem& system, const BathSpec& bath_template,
                                      std::span<const double> factors,
                                      const SimulationOptions& options, T2Method method) {
    if (factors.empty()) throw InputError("density sweep needs at least one factor");
    for (double f : factors) {
        if (!(f > 0.0 && f <= 1.0)) {
            throw InputError("density factors must lie in (0, 1], got " + std::to_string(f));
        }
    }
    std::vector<SweepPoint> out;
    out.reserve(factors.size());
    for (double f : factors) {
        BathSpec spec = bath_template;
        spec.density = bath_template.density * f;
        SweepPoint point;
        point.factor = f;
        point.coherence = simulate(system, spec, options).coherence;
        point.t2 = extract_t2(point.coherence, method);
        out.push_back(std::move(point));
    }
    return out;
}

DistanceProfile ensemble_distance_profile(const SpinSystem& system, const BathSpec& bath,
                                          const CouplingOptions& coupling,
                                          const std::set<std::size_t>& group, double bin_width,
                                          std::size_t workers) {
    bath.validate();
    for (std::size_t id : group) {
        if (id >= system.molecular_spins().size()) {
            throw InputError("spin group references molecular spin " + std::to_string(id) +
                             ", but the molecule has " +
                             std::to_string(system.molecular_spins().size()) + " spins");
        }
    }
    const std::size_t n = bath.density > 0.0 ? bath.n_configs : 1;
    const std::size_t resolved = resolve_workers(workers);
    const std::size_t batch = std::max<std::size_t>(16, 4 * resolved);

    DistanceProfile total = distance_profile({}, group, bin_width);
    std::vector<DistanceProfile> parts;
    for (std::size_t first = 0; first < n; first += batch) {
        const std::size_t count = std::min(batch, n - first);
        parts.assign(count, {});
        parallel_for(count, resolved, [&](std::size_t j) {
            const auto config = sample_configuration(bath, system, first + j);
            const auto contributions = configuration_contributions(system, config, coupling);
            parts[j] = distance_profile(contributions, group, bin_width);
        });
        for (const auto& part : parts) total = merge_profiles(total, part);
    }
    return total;
}

}  // namespace spinpair
