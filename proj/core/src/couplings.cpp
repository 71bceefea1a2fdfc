#include "spinpair/couplings.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "spinpair/bath.hpp"
#include "spinpair/dephasing.hpp"
#include "spinpair/error.hpp"

namespace spinpair {

std::string_view to_string(PairClass c) {
    switch (c) {
        case PairClass::Intramolecular: return "intramolecular";
        case PairClass::MoleculeSolvent: return "molecule-solvent";
        case PairClass::SolventSolvent: return "solvent-solvent";
    }
    return "unknown";
}

PairClass parse_pair_class(std::string_view text) {
    if (text == "intramolecular" || text == "intra") return PairClass::Intramolecular;
    if (text == "molecule-solvent" || text == "ms") return PairClass::MoleculeSolvent;
    if (text == "solvent-solvent" || text == "ss") return PairClass::SolventSolvent;
    throw InputError("unknown pair class '" + std::string(text) + "'");
}

namespace {

// Returns r (m) and cos^2 of the angle to the axis; throws on r = 0.
std::pair<double, double> separation(const Vec3& from, const Vec3& to, const Vec3& axis,
                                     const char* what) {
    const Vec3 d = to - from;
    const double r = d.norm();
    if (!(r > 0.0)) throw DegenerateGeometry(std::string(what) + ": coincident positions");
    const double c = d.dot(axis) / r;
    return {r * constants::angstrom, c * c};
}

}  // namespace

double dipolar_b(const Vec3& pos_k, const Vec3& pos_l, double gamma_k, double gamma_l,
                 const Vec3& field_axis) {
    const auto [r, cos2] = separation(pos_k, pos_l, field_axis, "dipolar coupling");
    const double d = constants::mu0_over_4pi * gamma_k * gamma_l * constants::hbar / (r * r * r);
    return units::to_rad_per_us(-d * (1.0 - 3.0 * cos2) / 4.0);
}

double point_dipole_azz(const Vec3& electron_pos, const Vec3& nucleus_pos, double gamma_n,
                        const Vec3& field_axis) {
    const auto [r, cos2] = separation(electron_pos, nucleus_pos, field_axis, "hyperfine coupling");
    const double d =
        constants::mu0_over_4pi * constants::gamma_electron * gamma_n * constants::hbar / (r * r * r);
    return units::to_rad_per_us(d * (3.0 * cos2 - 1.0));
}

std::vector<double> bath_hyperfine(const SpinSystem& system, const BathConfiguration& bath) {
    std::vector<double> a;
    if (bath.positions.empty()) return a;
    const double gamma = lookup_gamma(bath.isotope);
    a.reserve(bath.positions.size());
    for (const auto& p : bath.positions) {
        a.push_back(point_dipole_azz(system.electron().position, p, gamma, system.field_axis()));
    }
    return a;
}

namespace {

struct SpinView {
    Vec3 position;
    double gamma;
    double a_zz;
    int isotope_id;
};

// Uniform cell grid over a point set; cells are at least `cell` wide so all
// neighbours within `cell` lie in the 27 surrounding cells.
class CellGrid {
public:
    CellGrid(const std::vector<SpinView>& spins, std::size_t first, double cell)
        : spins_(spins), first_(first) {
        lo_ = Vec3::Constant(std::numeric_limits<double>::max());
        Vec3 hi = Vec3::Constant(std::numeric_limits<double>::lowest());
        for (std::size_t i = first_; i < spins_.size(); ++i) {
            lo_ = lo_.cwiseMin(spins_[i].position);
            hi = hi.cwiseMax(spins_[i].position);
        }
        constexpr int kMaxDim = 64;
        for (int a = 0; a < 3; ++a) {
            const double extent = hi[a] - lo_[a];
            const int n = std::clamp(static_cast<int>(std::floor(extent / cell)) + 1, 1, kMaxDim);
            dims_[a] = n;
            width_[a] = std::max(cell, extent / n * (1.0 + 1e-12));
        }
        const std::size_t n_cells = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
        start_.assign(n_cells + 1, 0);
        std::vector<std::size_t> cell_of(spins_.size() - first_);
        for (std::size_t i = first_; i < spins_.size(); ++i) {
            cell_of[i - first_] = flat(coords(spins_[i].position));
            ++start_[cell_of[i - first_] + 1];
        }
        for (std::size_t c = 0; c < n_cells; ++c) start_[c + 1] += start_[c];
        members_.resize(cell_of.size());
        std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
        for (std::size_t i = 0; i < cell_of.size(); ++i) members_[fill[cell_of[i]]++] = i + first_;
    }

    // Calls f(j) for every grid spin j in the 27 cells around p.
    template <class F>
    void for_each_near(const Vec3& p, F&& f) const {
        const auto c = coords(p);
        for (int dx = -1; dx <= 1; ++dx) {
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dz = -1; dz <= 1; ++dz) {
                    const std::array<int, 3> n{c[0] + dx, c[1] + dy, c[2] + dz};
                    if (n[0] < 0 || n[1] < 0 || n[2] < 0 || n[0] >= dims_[0] || n[1] >= dims_[1] ||
                        n[2] >= dims_[2]) {
                        continue;
                    }
                    const std::size_t cell = flat(n);
                    for (std::size_t m = start_[cell]; m < start_[cell + 1]; ++m) f(members_[m]);
                }
            }
        }
    }

private:
    std::array<int, 3> coords(const Vec3& p) const {
        std::array<int, 3> c{};
        for (int a = 0; a < 3; ++a) {
            // Points outside the indexed set clamp to the boundary cells; a
            // query farther than one cell outside finds nothing within cutoff
            // anyway because the distance check follows.
            c[a] = std::clamp(static_cast<int>(std::floor((p[a] - lo_[a]) / width_[a])), -1,
                              dims_[a]);
        }
        return c;
    }
    std::size_t flat(const std::array<int, 3>& c) const {
        return (static_cast<std::size_t>(c[0]) * dims_[1] + c[1]) * dims_[2] + c[2];
    }

    const std::vector<SpinView>& spins_;
    std::size_t first_;
    Vec3 lo_;
    std::array<int, 3> dims_{};
    std::array<double, 3> width_{};
    std::vector<std::size_t> start_;
    std::vector<std::size_t> members_;
};

}  // namespace

std::vector<PairCoupling> build_pair_couplings(const SpinSystem& system,
                                               const BathConfiguration& bath,
                                               const CouplingOptions& options) {
    if (!(options.cutoff_r > 0.0)) throw InputError("cutoff_r must be positive");
    if (!(options.alpha2_floor >= 0.0)) throw InputError("alpha2_floor must be non-negative");

    // Isotopes are compared by label; ids keep the inner loops string-free.
    std::vector<std::string> labels;
    auto isotope_id = [&](const std::string& label) {
        const auto it = std::find(labels.begin(), labels.end(), label);
        if (it != labels.end()) return static_cast<int>(it - labels.begin());
        labels.push_back(label);
        return static_cast<int>(labels.size() - 1);
    };

    const auto& molecular = system.molecular_spins();
    const std::size_t n_mol = molecular.size();
    std::vector<SpinView> spins;
    spins.reserve(n_mol + bath.positions.size());
    for (const auto& s : molecular) spins.push_back({s.position, s.gamma, s.a_zz, isotope_id(s.isotope)});
    if (!bath.positions.empty()) {
        const auto a = bath_hyperfine(system, bath);
        const double gamma = lookup_gamma(bath.isotope);
        const int id = isotope_id(bath.isotope);
        for (std::size_t i = 0; i < bath.positions.size(); ++i) {
            spins.push_back({bath.positions[i], gamma, a[i], id});
        }
    }

    const Vec3& axis = system.field_axis();
    const double cutoff = options.cutoff_r;
    const double cutoff2 = cutoff * cutoff;
    std::vector<PairCoupling> pairs;

    auto emit = [&](std::size_t k, std::size_t l, PairClass cls, bool keep_always) {
        const auto& sk = spins[k];
        const auto& sl = spins[l];
        if (sk.isotope_id != sl.isotope_id) return;
        const double r = (sl.position - sk.position).norm();
        if (!keep_always && r > cutoff) return;
        PairCoupling p;
        p.index_k = k;
        p.index_l = l;
        p.b = dipolar_b(sk.position, sl.position, sk.gamma, sl.gamma, axis);
        p.delta = sk.a_zz - sl.a_zz;
        p.r_nn = r;
        p.pair_class = cls;
        if (!keep_always && modulation_depth(p.delta, p.b) < options.alpha2_floor) return;
        pairs.push_back(p);
    };

    for (std::size_t k = 0; k < n_mol; ++k) {
        for (std::size_t l = k + 1; l < n_mol; ++l) emit(k, l, PairClass::Intramolecular, true);
    }

    const std::size_t n_all = spins.size();
    if (n_all > n_mol) {
        if (!std::isfinite(cutoff)) {
            for (std::size_t k = 0; k < n_mol; ++k) {
                for (std::size_t l = n_mol; l < n_all; ++l) emit(k, l, PairClass::MoleculeSolvent, false);
            }
            for (std::size_t k = n_mol; k < n_all; ++k) {
                for (std::size_t l = k + 1; l < n_all; ++l) emit(k, l, PairClass::SolventSolvent, false);
            }
        } else {
            const CellGrid grid(spins, n_mol, cutoff);
            for (std::size_t k = 0; k < n_mol; ++k) {
                grid.for_each_near(spins[k].position, [&](std::size_t l) {
                    if ((spins[l].position - spins[k].position).squaredNorm() <= cutoff2) {
                        emit(k, l, PairClass::MoleculeSolvent, false);
                    }
                });
            }
            for (std::size_t k = n_mol; k < n_all; ++k) {
                grid.for_each_near(spins[k].position, [&](std::size_t l) {
                    if (l > k && (spins[l].position - spins[k].position).squaredNorm() <= cutoff2) {
                        emit(k, l, PairClass::SolventSolvent, false);
                    }
                });
            }
        }
    }

    std::sort(pairs.begin(), pairs.end(), [](const PairCoupling& x, const PairCoupling& y) {
        return std::tie(x.pair_class, x.index_k, x.index_l) <
               std::tie(y.pair_class, y.index_k, y.index_l);
    });
    return pairs;
}

}  // namespace spinpair
