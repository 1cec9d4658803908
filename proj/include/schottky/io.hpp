#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "schottky/error.hpp"
#include "schottky/linalg.hpp"
#include "schottky/schottky_data.hpp"

namespace schottky::io {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// JSON parsing
// ---------------------------------------------------------------------------

/// 1-based line and column of a byte offset in `text`.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports the byte index just past the offending character.
        const std::size_t at = e.byte == 0 ? 0 : e.byte - 1;
        const auto [line, col] = line_column(text, at);
        std::ostringstream os;
        os << source << ":" << line << ":" << col << ": JSON syntax error";
        const std::string what = e.what();
        if (const auto pos = what.find("syntax error"); pos != std::string::npos) os << what.substr(pos + 12);
        throw ParseError(os.str());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Rejects keys outside `allowed`.
inline void require_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where + ": expected a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.count(key)) throw ParseError(where + ": unknown key \"" + key + "\"");
    }
}

inline const json& field(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + ": missing key \"" + std::string(key) + "\"");
    return *it;
}

inline double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ParseError(where + ": expected a number");
    return v.get<double>();
}

inline std::int64_t integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
    return v.get<std::int64_t>();
}

/// Schottky data from the JSON document
///   {"n": N, "generators": [[a,b,c,d], ...N], "disks": [{"center": c, "radius": r}, ...2N]}.
inline SchottkyData schottky_from_json(const json& doc, const std::string& source) {
    require_keys(doc, {"n", "generators", "disks"}, source);
    const std::int64_t n = integer(field(doc, "n", source), source + ": n");
    if (n < 2) throw GeometryError(source + ": rank n must be >= 2 (got " + std::to_string(n) + ")");
    const json& gens = field(doc, "generators", source);
    const json& disks = field(doc, "disks", source);
    if (!gens.is_array() || static_cast<std::int64_t>(gens.size()) != n) {
        throw ParseError(source + ": generators must be an array of n = " + std::to_string(n) + " entries");
    }
    if (!disks.is_array() || static_cast<std::int64_t>(disks.size()) != 2 * n) {
        throw ParseError(source + ": disks must be an array of 2n = " + std::to_string(2 * n) + " entries");
    }
    std::vector<MobiusMap> maps;
    for (std::size_t k = 0; k < gens.size(); ++k) {
        const std::string where = source + ": generators[" + std::to_string(k) + "]";
        const json& g = gens[k];
        if (!g.is_array() || g.size() != 4) throw ParseError(where + ": expected [a, b, c, d]");
        maps.push_back(MobiusMap::from_entries(number(g[0], where), number(g[1], where), number(g[2], where),
                                               number(g[3], where)));
    }
    std::vector<Disk> ds;
    for (std::size_t k = 0; k < disks.size(); ++k) {
        const std::string where = source + ": disks[" + std::to_string(k) + "]";
        require_keys(disks[k], {"center", "radius"}, where);
        ds.push_back(Disk{number(field(disks[k], "center", where), where + ".center"),
                          number(field(disks[k], "radius", where), where + ".radius")});
    }
    return SchottkyData(std::move(maps), std::move(ds));
}

inline SchottkyData load_schottky(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    return schottky_from_json(parse_json_text(text, path.string()), path.string());
}

inline json schottky_to_json(const SchottkyData& data) {
    json gens = json::array();
    for (Letter a = 0; a < data.rank(); ++a) {
        const MobiusMap& m = data.generator(a);
        gens.push_back({m.a, m.b, m.c, m.d});
    }
    json disks = json::array();
    for (Letter a = 0; a < data.alphabet().size(); ++a) {
        disks.push_back({{"center", data.disk(a).center}, {"radius", data.disk(a).radius}});
    }
    return json{{"n", data.rank()}, {"generators", gens}, {"disks", disks}};
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns)
        : out_(path, std::ios::binary), columns_(columns.size()) {
        if (!out_) throw Error(path.string() + ": cannot open for writing");
        write_row(columns);
    }

    template <typename... Ts>
    void row(const Ts&... values) {
        static_assert(sizeof...(Ts) > 0);
        std::vector<std::string> cells{cell(values)...};
        if (cells.size() != columns_) throw Error("CSV row has the wrong number of columns");
        write_row(cells);
    }

private:
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(long long v) { return std::to_string(v); }
    static std::string cell(unsigned long v) { return std::to_string(v); }
    static std::string cell(unsigned long long v) { return std::to_string(v); }
    static std::string cell(bool v) { return v ? "1" : "0"; }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }

    void write_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
    std::size_t columns_;
};

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

inline std::string compiler_version() {
#if defined(__clang__)
    return "clang " __clang_version__;
#elif defined(__GNUC__)
    return "gcc " __VERSION__;
#else
    return "unknown";
#endif
}

struct Manifest {
    std::string command;
    std::vector<std::string> argv;
    json inputs = json::object();
    json parameters = json::object();
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> artifacts;
    double wall_time_s = 0.0;

    json to_json() const {
        return json{{"command", command},
                    {"argv", argv},
                    {"inputs", inputs},
                    {"parameters", parameters},
                    {"seeds", seeds},
                    {"artifacts", artifacts},
                    {"versions",
                     {{"schottky-lab", kVersion},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                    "." + std::to_string(EIGEN_MINOR_VERSION)},
                      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                      {"compiler", compiler_version()}}},
                    {"wall_time_s", wall_time_s}};
    }

    void write(const std::filesystem::path& dir) const {
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        if (!out) throw Error((dir / "manifest.json").string() + ": cannot open for writing");
        out << to_json().dump(2) << '\n';
    }
};

// ---------------------------------------------------------------------------
// Binary matrix dump
// ---------------------------------------------------------------------------
//
// Layout (little-endian): 8-byte ASCII magic "SLMATRX1", uint64 rows, uint64 cols,
// then rows*cols entries in row-major order, each as two 8-byte IEEE doubles
// (real part, imaginary part).

inline constexpr char kMatrixMagic[8] = {'S', 'L', 'M', 'A', 'T', 'R', 'X', '1'};

inline void write_matrix(const std::filesystem::path& path, const MatrixC& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(path.string() + ": cannot open for writing");
    out.write(kMatrixMagic, 8);
    const std::uint64_t dims[2] = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double pair[2] = {m(i, j).real(), m(i, j).imag()};
            out.write(reinterpret_cast<const char*>(pair), sizeof pair);
        }
    }
}

inline MatrixC read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string() + ": cannot open file");
    char magic[8];
    in.read(magic, 8);
    if (!in || !std::equal(magic, magic + 8, kMatrixMagic)) throw ParseError(path.string() + ": bad matrix magic");
    std::uint64_t dims[2];
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    if (!in) throw ParseError(path.string() + ": truncated header");
    MatrixC m(static_cast<Eigen::Index>(dims[0]), static_cast<Eigen::Index>(dims[1]));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double pair[2];
            in.read(reinterpret_cast<char*>(pair), sizeof pair);
            if (!in) throw ParseError(path.string() + ": truncated matrix data");
            m(i, j) = cplx{pair[0], pair[1]};
        }
    }
    return m;
}

}  // namespace schottky::io
