#pragma once

// Text formats: XYZ geometry, the JSON system file, and CSV tables.
//
// CSV numbers are written with 17 significant digits so every double
// round-trips exactly.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "spinpair/analysis.hpp"
#include "spinpair/dephasing.hpp"
#include "spinpair/model.hpp"
#include "spinpair/oracle.hpp"
#include "spinpair/pipeline.hpp"

namespace spinpair {

/// Count line, comment line, then `element x y z` rows (Angstrom).
/// Throws ParseError with the 1-based line number.
std::vector<Atom> parse_xyz(std::string_view text);

struct ParsedSystem {
    SpinSystem system;
    std::vector<std::string> warnings;
};

/// Parses a system document (schema in docs/system-file.md). A "geometry"
/// string is resolved relative to base_dir and read as XYZ.
ParsedSystem parse_system(std::string_view document,
                          const std::filesystem::path& base_dir = {});
ParsedSystem load_system(const std::filesystem::path& path);

/// Shortest exact decimal form is not required; always 17 significant digits.
std::string format_double(double value);
/// Full-string parse; throws InputError otherwise.
double parse_double(std::string_view text);

void write_curve_csv(std::ostream& out, const CoherenceCurve& curve);
CoherenceCurve read_curve_csv(std::istream& in);

void write_pairs_csv(std::ostream& out, const std::vector<RankedPair>& ranked);

struct PairRow {
    std::size_t rank = 0;
    PairClass pair_class = PairClass::Intramolecular;
    std::size_t index_k = 0, index_l = 0;
    double r_nn = 0.0, alpha2 = 0.0, freq = 0.0, score = 0.0;
};
std::vector<PairRow> read_pairs_csv(std::istream& in);

void write_profile_csv(std::ostream& out, const DistanceProfile& profile);
DistanceProfile read_profile_csv(std::istream& in);

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& sweep);

struct SweepRow {
    double factor = 0.0;
    T2Result t2;
};
std::vector<SweepRow> read_sweep_csv(std::istream& in);

void write_oracle_csv(std::ostream& out, const Tcl2Comparison& comparison);

/// Oracle problem document: {"a_rad_per_s": [...], "b_rad_per_s": [[...], ...]}.
SmallSpinProblem parse_oracle_problem(std::string_view document);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace spinpair
