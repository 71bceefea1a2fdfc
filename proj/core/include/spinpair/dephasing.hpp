#pragma once

// Pair kernel for spin-pair flip-flop dephasing.
//
// Every homonuclear pair (k, l) with hyperfine difference delta and
// flip-flop amplitude b contributes
//
//     W(t) = alpha2 * sin^4(t * sqrt(delta^2 + b^2) / 4),
//     alpha2 = (2 delta b / (delta^2 + b^2))^2,
//
// and the normalized electron coherence is exp(-sum_kl W_kl(t)). Here t is
// the total echo time and all frequencies are in rad/us.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "spinpair/couplings.hpp"

namespace spinpair {

/// Strictly increasing sample times starting at 0, in microseconds.
class TimeGrid {
public:
    /// n_points samples on [0, t_max].
    static TimeGrid uniform(double t_max, std::size_t n_points);
    /// Arbitrary grid; throws InputError unless times[0] == 0 and strictly increasing.
    static TimeGrid from_points(std::vector<double> times);

    [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }
    [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return times_[i]; }
    /// Spacing when the grid is exactly i * dt, otherwise empty.
    [[nodiscard]] std::optional<double> step() const noexcept { return step_; }

    bool operator==(const TimeGrid& other) const { return times_ == other.times_; }

private:
    TimeGrid(std::vector<double> times, std::optional<double> step)
        : times_(std::move(times)), step_(step) {}

    std::vector<double> times_;
    std::optional<double> step_;
};

struct PairContribution {
    PairCoupling coupling;
    double alpha2 = 0.0;  // modulation depth
    double freq = 0.0;    // rad/us
    PairClass pair_class = PairClass::Intramolecular;
};

struct CoherenceCurve {
    std::vector<double> times;
    std::vector<double> values;  // |rho01(t) / rho01(0)|
};

/// Subset of pair classes. Default-constructed set is empty.
class ClassSet {
public:
    constexpr ClassSet() = default;
    static constexpr ClassSet all() { return ClassSet(0b111u); }
    static constexpr ClassSet only(PairClass c) { return ClassSet(bit(c)); }

    constexpr ClassSet& insert(PairClass c) {
        bits_ |= bit(c);
        return *this;
    }
    [[nodiscard]] constexpr bool contains(PairClass c) const { return (bits_ & bit(c)) != 0; }
    [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
    constexpr bool operator==(const ClassSet&) const = default;

private:
    constexpr explicit ClassSet(unsigned bits) : bits_(bits) {}
    static constexpr unsigned bit(PairClass c) { return 1u << static_cast<unsigned>(c); }
    unsigned bits_ = 0;
};

/// (2 delta b / (delta^2 + b^2))^2; 0 when delta = b = 0.
double modulation_depth(double delta, double b);

/// sqrt(delta^2 + b^2) / 4.
double pair_frequency(double delta, double b);

/// alpha2 * sin^4(t * sqrt(delta^2 + b^2) / 4).
double w_of_t(double t, double delta, double b);

/// Time of the first maximum of W, 2 pi / sqrt(delta^2 + b^2); +inf for a frozen pair.
double first_maximum_time(double delta, double b);

PairContribution make_contribution(const PairCoupling& coupling);
std::vector<PairContribution> make_contributions(std::span<const PairCoupling> couplings);

/// sum_kl W_kl(t) on the grid, restricted to filter classes when given.
///
/// Pairs are processed in fixed blocks whose partial sums are combined in
/// block order, so the result is bit-identical for any worker count.
std::vector<double> sum_w(std::span<const PairContribution> contributions, const TimeGrid& grid,
                          std::optional<ClassSet> filter = std::nullopt, std::size_t workers = 1);

/// exp(-sum W) on the grid. Values underflowing double are held at the
/// smallest normal double so the curve stays strictly positive.
CoherenceCurve coherence_curve(std::span<const PairContribution> contributions,
                               const TimeGrid& grid, std::optional<ClassSet> filter = std::nullopt,
                               std::size_t workers = 1);

/// Coherence from an accumulated sum_w buffer.
CoherenceCurve coherence_from_sum(const TimeGrid& grid, std::span<const double> w_sum);

struct RankedPair {
    PairContribution contribution;
    double score = 0.0;   // W at t_star
    double t_star = 0.0;  // min(horizon, first maximum time), us
};

/// Pairs by descending W(min(horizon, first maximum)); ties by
/// (class, index_k, index_l). Returns at most top_n entries.
std::vector<RankedPair> rank_pairs(std::span<const PairContribution> contributions, double horizon,
                                   std::size_t top_n);

}  // namespace spinpair
