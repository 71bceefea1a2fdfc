#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "spinpair/dephasing.hpp"

namespace spinpair {

/// Pointwise mean of curves on one grid, accumulated in insertion order.
class EnsembleAccumulator {
public:
    void add(const CoherenceCurve& curve);
    [[nodiscard]] std::size_t count() const noexcept { return count_; }
    /// Throws InputError when nothing was added.
    [[nodiscard]] CoherenceCurve mean() const;

private:
    std::vector<double> times_;
    std::vector<double> sum_;
    std::vector<double> lo_, hi_;
    std::size_t count_ = 0;
};

/// Throws InputError on an empty input or mismatched grids.
CoherenceCurve ensemble_average(std::span<const CoherenceCurve> curves);

enum class T2Method { OneOverE, StretchedExp };

std::string_view to_string(T2Method m);
T2Method parse_t2_method(std::string_view text);

struct T2Result {
    double t2 = 0.0;  // us
    T2Method method = T2Method::OneOverE;
    std::optional<double> stretch_beta;
    double fit_residual = 0.0;  // RMS of the fit; 0 for threshold crossing
};

inline constexpr double kStretchBetaMin = 0.5;
inline constexpr double kStretchBetaMax = 4.0;

/// OneOverE: linear interpolation of the first crossing of 1/e.
/// StretchedExp: least-squares fit of exp(-(t/T2)^beta), beta in [0.5, 4],
/// started from the OneOverE estimate and beta = 2.
/// Throws InsufficientDecay when the curve does not fall below 1/e
/// (OneOverE) or 0.9 (StretchedExp).
T2Result extract_t2(const CoherenceCurve& curve, T2Method method = T2Method::OneOverE);

struct DistanceProfile {
    double bin_width = 0.5;
    std::vector<double> bin_centers;  // Angstrom
    std::vector<double> mean_alpha2;  // 0 for empty bins
    std::vector<std::size_t> counts;
};

/// Molecule-solvent pairs whose molecular member is in `group`, binned by
/// r_nn into [i w, (i+1) w), i = 0..last occupied bin.
DistanceProfile distance_profile(std::span<const PairContribution> contributions,
                                 const std::set<std::size_t>& group, double bin_width);

/// Count-weighted merge of two profiles with equal bin width.
DistanceProfile merge_profiles(const DistanceProfile& a, const DistanceProfile& b);

}  // namespace spinpair
