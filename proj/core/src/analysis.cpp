#include "spinpair/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "spinpair/error.hpp"

namespace spinpair {

void EnsembleAccumulator::add(const CoherenceCurve& curve) {
    if (curve.values.size() != curve.times.size()) throw InputError("curve has mismatched columns");
    if (count_ == 0) {
        times_ = curve.times;
        sum_.assign(curve.values.begin(), curve.values.end());
        lo_ = curve.values;
        hi_ = curve.values;
    } else {
        if (curve.times != times_) throw InputError("cannot average curves on different time grids");
        for (std::size_t i = 0; i < sum_.size(); ++i) {
            sum_[i] += curve.values[i];
            lo_[i] = std::min(lo_[i], curve.values[i]);
            hi_[i] = std::max(hi_[i], curve.values[i]);
        }
    }
    ++count_;
}

CoherenceCurve EnsembleAccumulator::mean() const {
    if (count_ == 0) throw InputError("no curves to average");
    CoherenceCurve out;
    out.times = times_;
    out.values.resize(sum_.size());
    const double n = static_cast<double>(count_);
    for (std::size_t i = 0; i < sum_.size(); ++i) {
        // Rounding in the sum may step one ulp outside the input envelope.
        out.values[i] = std::clamp(sum_[i] / n, lo_[i], hi_[i]);
    }
    return out;
}

CoherenceCurve ensemble_average(std::span<const CoherenceCurve> curves) {
    EnsembleAccumulator acc;
    for (const auto& c : curves) acc.add(c);
    return acc.mean();
}

std::string_view to_string(T2Method m) {
    switch (m) {
        case T2Method::OneOverE: return "one-over-e";
        case T2Method::StretchedExp: return "stretched-exp";
    }
    return "unknown";
}

T2Method parse_t2_method(std::string_view text) {
    if (text == "one-over-e" || text == "1/e" || text == "OneOverE") return T2Method::OneOverE;
    if (text == "stretched-exp" || text == "stretched" || text == "StretchedExp") {
        return T2Method::StretchedExp;
    }
    throw InputError("unknown T2 method '" + std::string(text) + "'");
}

namespace {

double min_value(const CoherenceCurve& curve) {
    return *std::min_element(curve.values.begin(), curve.values.end());
}

// First time the curve falls to `threshold`, linearly interpolated.
std::optional<double> first_crossing(const CoherenceCurve& curve, double threshold) {
    const auto& t = curve.times;
    const auto& v = curve.values;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] <= threshold) {
            const double frac = (v[i - 1] - threshold) / (v[i - 1] - v[i]);
            return t[i - 1] + frac * (t[i] - t[i - 1]);
        }
    }
    return std::nullopt;
}

constexpr double kBetaSpan = kStretchBetaMax - kStretchBetaMin;

double beta_from(double u) { return kStretchBetaMin + kBetaSpan / (1.0 + std::exp(-u)); }
double u_from(double beta) {
    const double s = (beta - kStretchBetaMin) / kBetaSpan;
    return std::log(s / (1.0 - s));
}

// Residuals exp(-(t/T2)^beta) - y with parameters (log T2, u), beta = beta_from(u).
struct StretchedExpResiduals : Eigen::DenseFunctor<double> {
    StretchedExpResiduals(const std::vector<double>& t, const std::vector<double>& y)
        : DenseFunctor<double>(2, static_cast<int>(t.size())), t_(t), y_(y) {}

    int operator()(const InputType& p, ValueType& f) const {
        const double t2 = std::exp(p(0));
        const double beta = beta_from(p(1));
        for (std::size_t i = 0; i < t_.size(); ++i) {
            f(static_cast<Eigen::Index>(i)) = std::exp(-std::pow(t_[i] / t2, beta)) - y_[i];
        }
        return 0;
    }

    int df(const InputType& p, JacobianType& jac) const {
        const double t2 = std::exp(p(0));
        const double beta = beta_from(p(1));
        const double s = (beta - kStretchBetaMin) / kBetaSpan;
        const double dbeta_du = kBetaSpan * s * (1.0 - s);
        for (std::size_t i = 0; i < t_.size(); ++i) {
            const auto row = static_cast<Eigen::Index>(i);
            const double log_ratio = std::log(t_[i] / t2);
            const double x = std::exp(beta * log_ratio);
            const double e = std::exp(-x);
            jac(row, 0) = beta * x * e;
            jac(row, 1) = -x * log_ratio * e * dbeta_du;
        }
        return 0;
    }

    const std::vector<double>& t_;
    const std::vector<double>& y_;
};

T2Result fit_stretched(const CoherenceCurve& curve) {
    constexpr double kFitThreshold = 0.9;
    const double lowest = min_value(curve);
    if (lowest > kFitThreshold) throw InsufficientDecay(lowest, kFitThreshold);

    double t2_start = 0.0;
    if (const auto t = first_crossing(curve, std::exp(-1.0))) {
        t2_start = *t;
    } else {
        // With beta = 2 the 0.9 crossing sits at T2 sqrt(-ln 0.9).
        t2_start = *first_crossing(curve, kFitThreshold) / std::sqrt(-std::log(kFitThreshold));
    }

    std::vector<double> t, y;
    for (std::size_t i = 1; i < curve.times.size(); ++i) {
        t.push_back(curve.times[i]);
        y.push_back(curve.values[i]);
    }
    StretchedExpResiduals residuals(t, y);
    Eigen::LevenbergMarquardt<StretchedExpResiduals> lm(residuals);
    lm.setXtol(1e-14);
    lm.setFtol(1e-14);
    lm.setMaxfev(2000);
    Eigen::VectorXd p(2);
    p << std::log(t2_start), u_from(2.0);
    lm.minimize(p);

    Eigen::VectorXd f(static_cast<Eigen::Index>(t.size()));
    residuals(p, f);
    T2Result r;
    r.method = T2Method::StretchedExp;
    r.t2 = std::exp(p(0));
    r.stretch_beta = beta_from(p(1));
    r.fit_residual = std::sqrt(f.squaredNorm() / static_cast<double>(t.size()));
    if (!std::isfinite(r.t2) || !(r.t2 > 0.0)) throw NumericError("stretched-exponential fit diverged");
    return r;
}

}  // namespace

T2Result extract_t2(const CoherenceCurve& curve, T2Method method) {
    if (curve.times.size() < 2 || curve.times.size() != curve.values.size()) {
        throw InputError("T2 extraction needs a curve with at least two samples");
    }
    if (method == T2Method::StretchedExp) return fit_stretched(curve);

    const double threshold = std::exp(-1.0);
    const auto t = first_crossing(curve, threshold);
    if (!t) throw InsufficientDecay(min_value(curve), threshold);
    T2Result r;
    r.t2 = *t;
    r.method = T2Method::OneOverE;
    return r;
}

DistanceProfile distance_profile(std::span<const PairContribution> contributions,
                                 const std::set<std::size_t>& group, double bin_width) {
    if (group.empty()) throw InputError("distance profile needs a non-empty spin group");
    if (!(bin_width > 0.0)) throw InputError("bin width must be positive");

    DistanceProfile profile;
    profile.bin_width = bin_width;
    std::vector<double> sums;
    for (const auto& c : contributions) {
        if (c.pair_class != PairClass::MoleculeSolvent) continue;
        if (!group.contains(c.coupling.index_k)) continue;
        const auto bin = static_cast<std::size_t>(std::floor(c.coupling.r_nn / bin_width));
        if (bin >= sums.size()) {
            sums.resize(bin + 1, 0.0);
            profile.counts.resize(bin + 1, 0);
        }
        sums[bin] += c.alpha2;
        ++profile.counts[bin];
    }
    profile.bin_centers.resize(sums.size());
    profile.mean_alpha2.resize(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) {
        profile.bin_centers[i] = (static_cast<double>(i) + 0.5) * bin_width;
        profile.mean_alpha2[i] =
            profile.counts[i] ? sums[i] / static_cast<double>(profile.counts[i]) : 0.0;
    }
    return profile;
}

DistanceProfile merge_profiles(const DistanceProfile& a, const DistanceProfile& b) {
    if (a.bin_width != b.bin_width) throw InputError("cannot merge profiles with different bins");
    DistanceProfile out;
    out.bin_width = a.bin_width;
    const std::size_t n = std::max(a.counts.size(), b.counts.size());
    out.bin_centers.resize(n);
    out.mean_alpha2.resize(n, 0.0);
    out.counts.resize(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        out.bin_centers[i] = (static_cast<double>(i) + 0.5) * out.bin_width;
        const std::size_t ca = i < a.counts.size() ? a.counts[i] : 0;
        const std::size_t cb = i < b.counts.size() ? b.counts[i] : 0;
        out.counts[i] = ca + cb;
        if (out.counts[i] == 0) continue;
        const double sa = ca ? a.mean_alpha2[i] * static_cast<double>(ca) : 0.0;
        const double sb = cb ? b.mean_alpha2[i] * static_cast<double>(cb) : 0.0;
        out.mean_alpha2[i] = (sa + sb) / static_cast<double>(out.counts[i]);
    }
    return out;
}

}  // namespace spinpair
