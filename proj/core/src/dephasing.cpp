#include "spinpair/dephasing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "spinpair/error.hpp"
#include "spinpair/parallel.hpp"

namespace spinpair {

TimeGrid TimeGrid::uniform(double t_max, std::size_t n_points) {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InputError("t_max must be positive");
    if (n_points < 2) throw InputError("time grid needs at least 2 points");
    const double dt = t_max / static_cast<double>(n_points - 1);
    std::vector<double> times(n_points);
    for (std::size_t i = 0; i < n_points; ++i) times[i] = static_cast<double>(i) * dt;
    return TimeGrid(std::move(times), dt);
}

TimeGrid TimeGrid::from_points(std::vector<double> times) {
    if (times.empty() || times.front() != 0.0) throw InputError("time grid must start at t = 0");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1]) || !std::isfinite(times[i])) {
            throw InputError("time grid must be strictly increasing");
        }
    }
    std::optional<double> step;
    if (times.size() >= 2) {
        const double dt = times[1];
        bool uniform = true;
        for (std::size_t i = 0; i < times.size() && uniform; ++i) {
            uniform = times[i] == static_cast<double>(i) * dt;
        }
        if (uniform) step = dt;
    }
    return TimeGrid(std::move(times), step);
}

double modulation_depth(double delta, double b) {
    const double scale = std::max(std::abs(delta), std::abs(b));
    if (scale == 0.0) return 0.0;
    const double d = delta / scale;
    const double c = b / scale;
    const double x = 2.0 * d * c / (d * d + c * c);
    return x * x;
}

double pair_frequency(double delta, double b) { return 0.25 * std::hypot(delta, b); }

double w_of_t(double t, double delta, double b) {
    const double s = std::sin(t * pair_frequency(delta, b));
    const double s2 = s * s;
    return modulation_depth(delta, b) * s2 * s2;
}

double first_maximum_time(double delta, double b) {
    const double omega = std::hypot(delta, b);
    if (omega == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::numbers::pi / omega;
}

PairContribution make_contribution(const PairCoupling& coupling) {
    PairContribution c;
    c.coupling = coupling;
    c.alpha2 = modulation_depth(coupling.delta, coupling.b);
    c.freq = pair_frequency(coupling.delta, coupling.b);
    c.pair_class = coupling.pair_class;
    return c;
}

std::vector<PairContribution> make_contributions(std::span<const PairCoupling> couplings) {
    std::vector<PairContribution> out;
    out.reserve(couplings.size());
    for (const auto& c : couplings) out.push_back(make_contribution(c));
    return out;
}

namespace {

constexpr std::size_t kBlockPairs = 2048;
constexpr std::size_t kLanes = 8;
constexpr std::size_t kAnchorEvery = 64;

// Adds alpha2 sin^4(i dt f) for up to kLanes pairs into out[i]. sin/cos are
// advanced by rotation and re-anchored with exact values every kAnchorEvery
// samples, which bounds the drift to a few ulp per segment.
void accumulate_uniform(const std::array<double, kLanes>& alpha2,
                        const std::array<double, kLanes>& freq, std::size_t lanes, double dt,
                        std::span<double> out) {
    std::array<double, kLanes> rot_c{}, rot_s{}, s{}, c{};
    for (std::size_t j = 0; j < lanes; ++j) {
        rot_c[j] = std::cos(dt * freq[j]);
        rot_s[j] = std::sin(dt * freq[j]);
    }
    const std::size_t n = out.size();
    for (std::size_t seg = 0; seg < n; seg += kAnchorEvery) {
        for (std::size_t j = 0; j < lanes; ++j) {
            const double arg = static_cast<double>(seg) * dt * freq[j];
            s[j] = std::sin(arg);
            c[j] = std::cos(arg);
        }
        const std::size_t end = std::min(n, seg + kAnchorEvery);
        for (std::size_t i = seg; i < end; ++i) {
            std::array<double, kLanes> w{};
            for (std::size_t j = 0; j < kLanes; ++j) {
                const double s2 = s[j] * s[j];
                w[j] = alpha2[j] * s2 * s2;
                const double ns = s[j] * rot_c[j] + c[j] * rot_s[j];
                const double nc = c[j] * rot_c[j] - s[j] * rot_s[j];
                s[j] = ns;
                c[j] = nc;
            }
            double acc = out[i];
            for (std::size_t j = 0; j < lanes; ++j) acc += w[j];
            out[i] = acc;
        }
    }
}

void accumulate_block(std::span<const PairContribution> block, const TimeGrid& grid,
                      const std::optional<ClassSet>& filter, std::span<double> out) {
    const auto& times = grid.times();
    const auto step = grid.step();
    std::array<double, kLanes> alpha2{}, freq{};
    std::size_t lanes = 0;
    auto flush = [&] {
        if (lanes == 0) return;
        accumulate_uniform(alpha2, freq, lanes, *step, out);
        alpha2.fill(0.0);
        freq.fill(0.0);
        lanes = 0;
    };
    for (const auto& p : block) {
        if (filter && !filter->contains(p.pair_class)) continue;
        if (p.alpha2 == 0.0) continue;
        if (step) {
            alpha2[lanes] = p.alpha2;
            freq[lanes] = p.freq;
            if (++lanes == kLanes) flush();
        } else {
            for (std::size_t i = 0; i < times.size(); ++i) {
                const double s = std::sin(times[i] * p.freq);
                const double s2 = s * s;
                out[i] += p.alpha2 * s2 * s2;
            }
        }
    }
    flush();
}

}  // namespace

std::vector<double> sum_w(std::span<const PairContribution> contributions, const TimeGrid& grid,
                          std::optional<ClassSet> filter, std::size_t workers) {
    const std::size_t n = grid.size();
    std::vector<double> total(n, 0.0);
    const std::size_t n_blocks = (contributions.size() + kBlockPairs - 1) / kBlockPairs;
    if (n_blocks == 0) return total;
    if (n_blocks == 1) {
        accumulate_block(contributions, grid, filter, total);
        // W(0) is exactly zero; rotation round-off must not leak into t = 0.
        total[0] = 0.0;
        return total;
    }

    std::vector<std::vector<double>> partial(n_blocks);
    parallel_for(n_blocks, workers, [&](std::size_t b) {
        partial[b].assign(n, 0.0);
        const std::size_t first = b * kBlockPairs;
        const std::size_t count = std::min(kBlockPairs, contributions.size() - first);
        accumulate_block(contributions.subspan(first, count), grid, filter, partial[b]);
    });
    for (const auto& p : partial) {
        for (std::size_t i = 0; i < n; ++i) total[i] += p[i];
    }
    total[0] = 0.0;
    return total;
}

CoherenceCurve coherence_from_sum(const TimeGrid& grid, std::span<const double> w_sum) {
    if (w_sum.size() != grid.size()) throw InputError("W sum does not match the time grid");
    CoherenceCurve curve;
    curve.times = grid.times();
    curve.values.resize(grid.size());
    constexpr double floor = std::numeric_limits<double>::min();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        curve.values[i] = std::max(std::exp(-w_sum[i]), floor);
    }
    curve.values[0] = 1.0;
    return curve;
}

CoherenceCurve coherence_curve(std::span<const PairContribution> contributions,
                               const TimeGrid& grid, std::optional<ClassSet> filter,
                               std::size_t workers) {
    const auto w = sum_w(contributions, grid, filter, workers);
    return coherence_from_sum(grid, w);
}

std::vector<RankedPair> rank_pairs(std::span<const PairContribution> contributions, double horizon,
                                   std::size_t top_n) {
    if (!(horizon > 0.0)) throw InputError("ranking horizon must be positive");
    std::vector<RankedPair> ranked;
    ranked.reserve(contributions.size());
    for (const auto& c : contributions) {
        RankedPair r;
        r.contribution = c;
        r.t_star = std::min(horizon, first_maximum_time(c.coupling.delta, c.coupling.b));
        r.score = w_of_t(r.t_star, c.coupling.delta, c.coupling.b);
        ranked.push_back(r);
    }
    auto before = [](const RankedPair& x, const RankedPair& y) {
        if (x.score != y.score) return x.score > y.score;
        const auto& a = x.contribution.coupling;
        const auto& b = y.contribution.coupling;
        return std::tie(a.pair_class, a.index_k, a.index_l) <
               std::tie(b.pair_class, b.index_k, b.index_l);
    };
    const std::size_t keep = std::min(top_n, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                      ranked.end(), before);
    ranked.resize(keep);
    return ranked;
}

}  // namespace spinpair
