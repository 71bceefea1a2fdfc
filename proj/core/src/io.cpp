#include "spinpair/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "spinpair/error.hpp"

namespace spinpair {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        const auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto [end, ec] =
        std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    if (ec != std::errc{}) throw NumericError("cannot format number");
    return std::string(buf.data(), end);
}

double parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
        throw InputError("not a number: '" + std::string(text) + "'");
    }
    return value;
}

std::vector<Atom> parse_xyz(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw ParseError(1, "empty XYZ input");

    std::size_t declared = 0;
    {
        const auto count = trim(lines[0]);
        const auto [end, ec] = std::from_chars(count.data(), count.data() + count.size(), declared);
        if (ec != std::errc{} || end != count.data() + count.size() || count.empty()) {
            throw ParseError(1, "expected atom count, got '" + std::string(count) + "'");
        }
    }

    std::vector<Atom> atoms;
    atoms.reserve(declared);
    std::size_t line_no = 2;  // comment line
    for (std::size_t i = 2; i < lines.size(); ++i) {
        line_no = i + 1;
        const auto fields = split_ws(lines[i]);
        if (fields.empty()) {
            if (atoms.size() == declared) continue;
            throw ParseError(line_no, "blank line inside the atom block");
        }
        if (atoms.size() == declared) {
            throw ParseError(line_no, "more atom rows than the declared count " + std::to_string(declared));
        }
        if (fields.size() < 4) throw ParseError(line_no, "expected 'element x y z'");
        Atom atom;
        atom.element = std::string(fields[0]);
        for (int a = 0; a < 3; ++a) {
            try {
                atom.position[a] = parse_double(fields[static_cast<std::size_t>(a) + 1]);
            } catch (const InputError&) {
                throw ParseError(line_no, "non-numeric coordinate '" +
                                              std::string(fields[static_cast<std::size_t>(a) + 1]) + "'");
            }
        }
        atoms.push_back(std::move(atom));
    }
    if (atoms.size() != declared) {
        throw ParseError(std::max<std::size_t>(line_no, lines.size()),
                         "count line declares " + std::to_string(declared) + " atoms, found " +
                             std::to_string(atoms.size()));
    }
    return atoms;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

Vec3 vec3_from(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 3) throw InputError(what + " must be a 3-element array");
    Vec3 v;
    for (int a = 0; a < 3; ++a) {
        if (!j[static_cast<std::size_t>(a)].is_number()) throw InputError(what + " must be numeric");
        v[a] = j[static_cast<std::size_t>(a)].get<double>();
    }
    if (!v.allFinite()) throw InputError(what + " must be finite");
    return v;
}

json parse_json(std::string_view document, const std::string& what) {
    try {
        return json::parse(document);
    } catch (const json::parse_error& e) {
        throw InputError(what + ": " + e.what());
    }
}

}  // namespace

ParsedSystem parse_system(std::string_view document, const std::filesystem::path& base_dir) {
    const json doc = parse_json(document, "system file");
    if (!doc.is_object()) throw InputError("system file must be a JSON object");
    std::vector<std::string> warnings;

    if (!doc.contains("electron")) throw InputError("system file: missing electron position");
    ElectronCenter electron{vec3_from(doc["electron"], "electron")};

    Vec3 axis = Vec3::UnitZ();
    if (doc.contains("field_axis")) {
        axis = vec3_from(doc["field_axis"], "field_axis");
        const double norm = axis.norm();
        if (!(norm > 0.0)) throw InputError("field_axis must be non-zero");
        if (std::abs(norm - 1.0) > 1e-12) {
            warnings.push_back("field_axis has length " + format_double(norm) +
                               "; normalized to unit length");
        }
        axis /= norm;
    }

    std::vector<Atom> atoms;
    if (doc.contains("atoms") && doc.contains("geometry")) {
        throw InputError("system file: give either 'atoms' or 'geometry', not both");
    }
    if (doc.contains("geometry")) {
        if (!doc["geometry"].is_string()) throw InputError("geometry must be a path string");
        const auto path = base_dir / doc["geometry"].get<std::string>();
        atoms = parse_xyz(read_text_file(path));
    } else if (doc.contains("atoms")) {
        const auto& list = doc["atoms"];
        if (!list.is_array()) throw InputError("atoms must be an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto& row = list[i];
            const std::string where = "atoms[" + std::to_string(i) + "]";
            if (!row.is_array() || row.size() != 4 || !row[0].is_string()) {
                throw InputError(where + " must be [element, x, y, z]");
            }
            json coords = json::array({row[1], row[2], row[3]});
            atoms.push_back({row[0].get<std::string>(), vec3_from(coords, where)});
        }
    }

    std::vector<NuclearSpin> spins;
    if (doc.contains("spins")) {
        const auto& list = doc["spins"];
        if (!list.is_array()) throw InputError("spins must be an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto& rec = list[i];
            const std::string where = "spins[" + std::to_string(i) + "]";
            if (!rec.is_object()) throw InputError(where + " must be an object");
            if (!rec.contains("atom") || !rec["atom"].is_number_integer()) {
                throw InputError(where + ": missing integer 'atom' index");
            }
            const auto index = rec["atom"].get<long long>();
            if (index < 0 || static_cast<std::size_t>(index) >= atoms.size()) {
                throw InputError(where + ": atom index " + std::to_string(index) +
                                 " out of range (molecule has " + std::to_string(atoms.size()) +
                                 " atoms)");
            }
            if (!rec.contains("isotope") || !rec["isotope"].is_string()) {
                throw InputError(where + ": missing isotope label");
            }
            const auto isotope = rec["isotope"].get<std::string>();
            const Vec3 position = atoms[static_cast<std::size_t>(index)].position;
            if (!rec.contains("a_zz_rad_per_s")) {
                throw InputError(where + ": missing a_zz_rad_per_s");
            }
            const auto& a = rec["a_zz_rad_per_s"];
            if (a.is_string() && a.get<std::string>() == "point-dipole") {
                spins.push_back(point_dipole_spin(electron, position, isotope, axis));
            } else if (a.is_number()) {
                NuclearSpin spin;
                spin.position = position;
                spin.isotope = isotope;
                spin.gamma = lookup_gamma(isotope);
                spin.a_zz = units::to_rad_per_us(a.get<double>());
                spin.a_source = HyperfineSource::FromFile;
                spins.push_back(std::move(spin));
            } else {
                throw InputError(where + ": a_zz_rad_per_s must be a number or \"point-dipole\"");
            }
        }
    }

    return {SpinSystem(electron, std::move(spins), std::move(atoms), axis), std::move(warnings)};
}

ParsedSystem load_system(const std::filesystem::path& path) {
    return parse_system(read_text_file(path), path.parent_path());
}

// --- CSV -------------------------------------------------------------------

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(std::istream& in, std::size_t expected_columns) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != expected_columns) {
            throw ParseError(line_no, "expected " + std::to_string(expected_columns) +
                                          " columns, got " + std::to_string(fields.size()));
        }
        std::vector<std::string> row(fields.begin(), fields.end());
        if (table.header.empty()) {
            table.header = std::move(row);
        } else {
            table.rows.push_back(std::move(row));
        }
    }
    if (table.header.empty()) throw ParseError(line_no, "missing CSV header");
    return table;
}

std::size_t parse_count(std::string_view text) {
    std::size_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw InputError("not a count: '" + std::string(text) + "'");
    }
    return v;
}

}  // namespace

void write_curve_csv(std::ostream& out, const CoherenceCurve& curve) {
    out << "t_us,coherence\n";
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        out << format_double(curve.times[i]) << ',' << format_double(curve.values[i]) << '\n';
    }
}

CoherenceCurve read_curve_csv(std::istream& in) {
    const auto table = read_csv(in, 2);
    CoherenceCurve curve;
    for (const auto& row : table.rows) {
        curve.times.push_back(parse_double(row[0]));
        curve.values.push_back(parse_double(row[1]));
    }
    return curve;
}

void write_pairs_csv(std::ostream& out, const std::vector<RankedPair>& ranked) {
    out << "rank,class,k,l,r_nn_angstrom,alpha2,f_rad_per_us,score\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& c = ranked[i].contribution;
        out << i + 1 << ',' << to_string(c.pair_class) << ',' << c.coupling.index_k << ','
            << c.coupling.index_l << ',' << format_double(c.coupling.r_nn) << ','
            << format_double(c.alpha2) << ',' << format_double(c.freq) << ','
            << format_double(ranked[i].score) << '\n';
    }
}

std::vector<PairRow> read_pairs_csv(std::istream& in) {
    const auto table = read_csv(in, 8);
    std::vector<PairRow> rows;
    for (const auto& r : table.rows) {
        PairRow row;
        row.rank = parse_count(r[0]);
        row.pair_class = parse_pair_class(r[1]);
        row.index_k = parse_count(r[2]);
        row.index_l = parse_count(r[3]);
        row.r_nn = parse_double(r[4]);
        row.alpha2 = parse_double(r[5]);
        row.freq = parse_double(r[6]);
        row.score = parse_double(r[7]);
        rows.push_back(row);
    }
    return rows;
}

void write_profile_csv(std::ostream& out, const DistanceProfile& profile) {
    out << "bin_center_angstrom,mean_alpha2,count\n";
    for (std::size_t i = 0; i < profile.counts.size(); ++i) {
        out << format_double(profile.bin_centers[i]) << ',' << format_double(profile.mean_alpha2[i])
            << ',' << profile.counts[i] << '\n';
    }
}

DistanceProfile read_profile_csv(std::istream& in) {
    const auto table = read_csv(in, 3);
    DistanceProfile profile;
    for (const auto& r : table.rows) {
        profile.bin_centers.push_back(parse_double(r[0]));
        profile.mean_alpha2.push_back(parse_double(r[1]));
        profile.counts.push_back(parse_count(r[2]));
    }
    if (!profile.bin_centers.empty()) profile.bin_width = 2.0 * profile.bin_centers.front();
    return profile;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& sweep) {
    out << "factor,t2_us,method,beta\n";
    for (const auto& p : sweep) {
        out << format_double(p.factor) << ',' << format_double(p.t2.t2) << ','
            << to_string(p.t2.method) << ','
            << (p.t2.stretch_beta ? format_double(*p.t2.stretch_beta) : std::string()) << '\n';
    }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    const auto table = read_csv(in, 4);
    std::vector<SweepRow> rows;
    for (const auto& r : table.rows) {
        SweepRow row;
        row.factor = parse_double(r[0]);
        row.t2.t2 = parse_double(r[1]);
        row.t2.method = parse_t2_method(r[2]);
        if (!r[3].empty()) row.t2.stretch_beta = parse_double(r[3]);
        rows.push_back(row);
    }
    return rows;
}

void write_oracle_csv(std::ostream& out, const Tcl2Comparison& comparison) {
    out << "t_us,exact,tcl2,deviation\n";
    for (std::size_t i = 0; i < comparison.exact.times.size(); ++i) {
        const double e = comparison.exact.values[i];
        const double p = comparison.tcl2.values[i];
        out << format_double(comparison.exact.times[i]) << ',' << format_double(e) << ','
            << format_double(p) << ',' << format_double(e - p) << '\n';
    }
}

SmallSpinProblem parse_oracle_problem(std::string_view document) {
    const json doc = parse_json(document, "oracle problem");
    if (!doc.is_object() || !doc.contains("a_rad_per_s")) {
        throw InputError("oracle problem needs 'a_rad_per_s'");
    }
    const auto& a = doc["a_rad_per_s"];
    if (!a.is_array()) throw InputError("a_rad_per_s must be an array");
    SmallSpinProblem problem;
    for (const auto& v : a) {
        if (!v.is_number()) throw InputError("a_rad_per_s entries must be numbers");
        problem.a_list.push_back(units::to_rad_per_us(v.get<double>()));
    }
    const auto n = static_cast<Eigen::Index>(problem.a_list.size());
    problem.b_matrix = Eigen::MatrixXd::Zero(n, n);
    if (doc.contains("b_rad_per_s")) {
        const auto& b = doc["b_rad_per_s"];
        if (!b.is_array() || static_cast<Eigen::Index>(b.size()) != n) {
            throw InputError("b_rad_per_s must be an n x n array");
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto& row = b[static_cast<std::size_t>(k)];
            if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
                throw InputError("b_rad_per_s must be an n x n array");
            }
            for (Eigen::Index l = 0; l < n; ++l) {
                const auto& v = row[static_cast<std::size_t>(l)];
                if (!v.is_number()) throw InputError("b_rad_per_s entries must be numbers");
                problem.b_matrix(k, l) = units::to_rad_per_us(v.get<double>());
            }
        }
    }
    problem.validate();
    return problem;
}

}  // namespace spinpair
