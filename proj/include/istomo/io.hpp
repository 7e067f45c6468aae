/**
 * File formats and run configuration: stiffness-map CSV with a JSON
 * metadata sidecar, fit-result JSON, and the RunConfig aggregating one
 * reproducible generate/fit/extract run.
 *
 * All stored values are strict SI.  Config files may tag values with
 * units ("10 kPa", "0.5 um", "80 nm"); they are converted on ingestion.
 * Numbers are written with enough digits to round-trip exactly, so
 * save/load is bit-identical and repeated runs are byte-identical.
 */

#ifndef ISTOMO_IO_HPP
#define ISTOMO_IO_HPP

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "istomo/elastic.hpp"
#include "istomo/fit.hpp"
#include "istomo/forward.hpp"

namespace istomo {

inline constexpr const char* kGeneratorVersion = "0.1.0";

using json = nlohmann::json;

/// %.17g formatting; guarantees exact double round-trip in CSV.
inline std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace units {

enum class Dimension { none, pressure, length, force };

struct UnitEntry {
    const char* tag;
    Dimension dim;
    double factor;
};

inline const UnitEntry* unit_table() {
    static const UnitEntry table[] = {
        {"Pa", Dimension::pressure, 1.0},   {"kPa", Dimension::pressure, 1e3},
        {"MPa", Dimension::pressure, 1e6},  {"GPa", Dimension::pressure, 1e9},
        {"m", Dimension::length, 1.0},      {"mm", Dimension::length, 1e-3},
        {"um", Dimension::length, 1e-6},    {"µm", Dimension::length, 1e-6},
        {"nm", Dimension::length, 1e-9},    {"N", Dimension::force, 1.0},
        {"mN", Dimension::force, 1e-3},     {"uN", Dimension::force, 1e-6},
        {"µN", Dimension::force, 1e-6}, {"nN", Dimension::force, 1e-9},
    };
    return table;
}
inline constexpr int kUnitCount = 14;

/**
 * Parse "<number>[ ]<unit>" with a dimension check, or a bare number
 * taken as SI.  Unknown tags and dimension mismatches are errors.
 */
inline double parse_quantity(const std::string& text, Dimension expected,
                             const std::string& field) {
    const char* s = text.c_str();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(s, &end);
    if (end == s || errno == ERANGE)
        throw std::invalid_argument("config field '" + field + "': cannot parse number in \"" +
                                    text + "\"");
    std::string tag(end);
    const auto first = tag.find_first_not_of(" \t");
    tag = first == std::string::npos ? std::string() : tag.substr(first);
    while (!tag.empty() && (tag.back() == ' ' || tag.back() == '\t')) tag.pop_back();
    if (tag.empty()) return value;
    for (int i = 0; i < kUnitCount; ++i) {
        const UnitEntry& u = unit_table()[i];
        if (tag == u.tag) {
            if (expected != Dimension::none && u.dim != expected)
                throw std::invalid_argument("config field '" + field + "': unit \"" + tag +
                                            "\" has the wrong dimension");
            return value * u.factor;
        }
    }
    throw std::invalid_argument("config field '" + field + "': unknown unit tag \"" + tag + "\"");
}

/// Accept a JSON number (SI) or a unit-tagged string.
inline double get_quantity(const json& j, const std::string& field, Dimension dim) {
    if (!j.contains(field))
        throw std::invalid_argument("config: missing field '" + field + "'");
    const json& v = j.at(field);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_quantity(v.get<std::string>(), dim, field);
    throw std::invalid_argument("config field '" + field + "': expected number or tagged string");
}

inline double get_quantity_element(const json& v, const std::string& field, Dimension dim) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_quantity(v.get<std::string>(), dim, field);
    throw std::invalid_argument("config field '" + field + "': expected number or tagged string");
}

}  // namespace units

/// One reproducible run: material, inclusion, indenter, and protocol.
struct RunConfig {
    MaterialParams material;
    InclusionParams inclusion;
    IndenterShape indenter;
    double w;        // indentation depth [m]
    GridSpec grid;
    NoiseSpec noise;
    double g3 = 0.0;  // regular Green-function offset [m/N]
    bool paper_normalization = false;
};

inline RunConfig parse_config(const json& j) {
    using units::Dimension;
    if (!j.contains("material") || !j.contains("inclusion") || !j.contains("indenter") ||
        !j.contains("protocol"))
        throw std::invalid_argument(
            "config: sections 'material', 'inclusion', 'indenter', 'protocol' are required");
    const json& jm = j.at("material");
    const json& ji = j.at("inclusion");
    const json& jn = j.at("indenter");
    const json& jp = j.at("protocol");

    MaterialParams material(units::get_quantity(jm, "E", Dimension::pressure),
                            units::get_quantity(jm, "nu", Dimension::none));

    std::array<double, 2> x0{0.0, 0.0};
    if (ji.contains("x0")) {
        const json& jx = ji.at("x0");
        if (!jx.is_array() || jx.size() != 2)
            throw std::invalid_argument("config field 'x0': expected [x1, x2]");
        x0[0] = units::get_quantity_element(jx[0], "x0", Dimension::length);
        x0[1] = units::get_quantity_element(jx[1], "x0", Dimension::length);
    }
    InclusionParams inclusion(units::get_quantity(ji, "d", Dimension::length), x0,
                              units::get_quantity(ji, "r_eps", Dimension::length),
                              units::get_quantity(ji, "alpha", Dimension::none),
                              units::get_quantity(ji, "nu0", Dimension::none));

    IndenterShape indenter(units::get_quantity(jn, "lambda_exp", Dimension::none),
                           units::get_quantity(jn, "A", Dimension::none));

    GridSpec grid;
    if (jp.contains("grid_extent")) {
        const json& je = jp.at("grid_extent");
        if (je.is_array()) {
            if (je.size() != 2)
                throw std::invalid_argument("config field 'grid_extent': expected 1 or 2 values");
            grid.extent1 = units::get_quantity_element(je[0], "grid_extent", Dimension::length);
            grid.extent2 = units::get_quantity_element(je[1], "grid_extent", Dimension::length);
        } else {
            grid.extent1 = units::get_quantity(jp, "grid_extent", Dimension::length);
            grid.extent2 = grid.extent1;
        }
    } else {
        grid.extent1 = grid.extent2 = 6.0 * inclusion.d;  // covers the anomaly FWHM with margin
    }
    grid.nx = jp.value("nx", 21);
    grid.ny = jp.value("ny", 21);
    if (jp.contains("center")) {
        const json& jc = jp.at("center");
        if (!jc.is_array() || jc.size() != 2)
            throw std::invalid_argument("config field 'center': expected [x1, x2]");
        grid.center1 = units::get_quantity_element(jc[0], "center", Dimension::length);
        grid.center2 = units::get_quantity_element(jc[1], "center", Dimension::length);
    }
    grid.validate();

    NoiseSpec noise;
    noise.sigma = jp.contains("noise_sigma")
                      ? units::get_quantity(jp, "noise_sigma", Dimension::none)
                      : 0.0;
    if (noise.sigma < 0.0) throw std::invalid_argument("config: noise_sigma must be nonnegative");
    if (jp.contains("seed")) {
        noise.seed = jp.at("seed").get<std::uint64_t>();
    } else if (noise.sigma > 0.0) {
        throw std::invalid_argument("config: seed is mandatory when noise_sigma > 0");
    }

    RunConfig cfg{material,
                  inclusion,
                  indenter,
                  units::get_quantity(jp, "w", Dimension::length),
                  grid,
                  noise,
                  jp.contains("g3") ? units::get_quantity(jp, "g3", Dimension::none) : 0.0,
                  false};
    if (j.contains("conventions")) {
        const json& jc = j.at("conventions");
        cfg.paper_normalization = jc.value("paper_normalization", false);
        const std::string u = jc.value("units", "SI");
        if (u != "SI")
            throw std::invalid_argument("config: only the SI unit system is supported, got '" + u +
                                        "'");
    }
    if (!(cfg.w > 0.0)) throw std::invalid_argument("config: w must be positive");
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config JSON parse error in " + path.string() + ": " +
                                    e.what());
    }
    return parse_config(j);
}

// ---- JSON views of the domain types -------------------------------------

inline json to_json(const MaterialParams& m) { return json{{"E", m.E}, {"nu", m.nu}}; }
inline json to_json(const IndenterShape& i) {
    return json{{"lambda_exp", i.lambda_exp}, {"A", i.A}};
}
inline json to_json(const InclusionParams& i) {
    return json{{"d", i.d}, {"x0", {i.x0[0], i.x0[1]}}, {"r_eps", i.r_eps},
                {"alpha", i.alpha}, {"nu0", i.nu0}};
}
inline json to_json(const PolarizationMatrix& p) {
    json rows = json::array();
    for (int i = 0; i < 6; ++i) {
        json row = json::array();
        for (int j = 0; j < 6; ++j) row.push_back(p.entries(i, j));
        rows.push_back(std::move(row));
    }
    return json{{"entries", std::move(rows)}, {"E", p.E}, {"v_eps", p.v_eps}};
}

// ---- Stiffness-map CSV + sidecar -----------------------------------------

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
    return std::filesystem::path(csv.string() + ".meta.json");
}

/**
 * Write the map as CSV (`x1,x2,stiffness`, SI) plus `<path>.meta.json`
 * carrying the protocol metadata.
 */
inline void save_map(const StiffnessMap& map, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write map file: " + path.string());
    out << "x1,x2,stiffness\n";
    for (const auto& p : map.points)
        out << g17(p.x1) << ',' << g17(p.x2) << ',' << g17(p.s) << '\n';
    out.close();
    if (!out) throw std::runtime_error("write failed: " + path.string());

    json meta{{"schema", "istomo-map/1"},
              {"generator_version",
               map.meta.generator_version.empty() ? kGeneratorVersion : map.meta.generator_version},
              {"units", map.meta.units},
              {"noise", {{"sigma", map.meta.noise.sigma}, {"seed", map.meta.noise.seed}}},
              {"warnings", map.meta.warnings}};
    if (map.meta.w) meta["w"] = *map.meta.w;
    if (map.meta.material) meta["material"] = to_json(*map.meta.material);
    if (map.meta.indenter) meta["indenter"] = to_json(*map.meta.indenter);
    if (map.meta.inclusion) meta["inclusion"] = to_json(*map.meta.inclusion);

    std::ofstream ms(sidecar_path(path), std::ios::binary);
    if (!ms) throw std::invalid_argument("cannot write sidecar: " + sidecar_path(path).string());
    ms << meta.dump(2) << '\n';
    if (!ms) throw std::runtime_error("write failed: " + sidecar_path(path).string());
}

namespace detail {

inline double parse_csv_double(const std::string& field, int line_no, const char* col) {
    const char* s = field.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0' || errno == ERANGE)
        throw std::invalid_argument("map CSV line " + std::to_string(line_no) +
                                    ": cannot parse column '" + col + "' value \"" + field + "\"");
    if (!std::isfinite(v))
        throw std::invalid_argument("map CSV line " + std::to_string(line_no) +
                                    ": non-finite value in column '" + col + "'");
    return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace detail

/**
 * Load a map CSV; the sidecar is read when present, otherwise the map
 * carries meta.present = false ("metadata absent") and later extraction
 * is refused for lack of the indentation depth.
 */
inline StiffnessMap load_map(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open map file: " + path.string());

    StiffnessMap map;
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("map CSV " + path.string() + ": empty file");
    {
        const auto cols = detail::split_csv(line);
        static const char* expected[3] = {"x1", "x2", "stiffness"};
        if (cols.size() != 3)
            throw std::invalid_argument("map CSV line 1: expected 3 columns, got " +
                                        std::to_string(cols.size()));
        for (int k = 0; k < 3; ++k)
            if (cols[k] != expected[k])
                throw std::invalid_argument("map CSV line 1: expected column '" +
                                            std::string(expected[k]) + "', got '" + cols[k] + "'");
    }

    std::set<std::pair<double, double>> seen;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cols = detail::split_csv(line);
        if (cols.size() != 3)
            throw std::invalid_argument("map CSV line " + std::to_string(line_no) +
                                        ": expected 3 fields, got " + std::to_string(cols.size()));
        MapPoint p;
        p.x1 = detail::parse_csv_double(cols[0], line_no, "x1");
        p.x2 = detail::parse_csv_double(cols[1], line_no, "x2");
        p.s = detail::parse_csv_double(cols[2], line_no, "stiffness");
        if (!(p.s > 0.0))
            throw std::invalid_argument("map CSV line " + std::to_string(line_no) +
                                        ": stiffness must be positive");
        if (!seen.insert({p.x1, p.x2}).second)
            throw std::invalid_argument("map CSV line " + std::to_string(line_no) +
                                        ": duplicate grid point");
        map.points.push_back(p);
    }

    const auto side = sidecar_path(path);
    if (!std::filesystem::exists(side)) {
        map.meta.present = false;
        return map;
    }
    std::ifstream ms(side);
    json meta;
    try {
        ms >> meta;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("sidecar JSON parse error in " + side.string() + ": " +
                                    e.what());
    }
    map.meta.present = true;
    if (meta.contains("w")) map.meta.w = meta.at("w").get<double>();
    if (meta.contains("units")) map.meta.units = meta.at("units").get<std::string>();
    if (meta.contains("generator_version"))
        map.meta.generator_version = meta.at("generator_version").get<std::string>();
    if (meta.contains("noise")) {
        map.meta.noise.sigma = meta.at("noise").value("sigma", 0.0);
        map.meta.noise.seed = meta.at("noise").value("seed", std::uint64_t{0});
    }
    if (meta.contains("warnings"))
        map.meta.warnings = meta.at("warnings").get<std::vector<std::string>>();
    if (meta.contains("material")) {
        const json& jm = meta.at("material");
        map.meta.material = MaterialParams(jm.at("E").get<double>(), jm.at("nu").get<double>());
    }
    if (meta.contains("indenter")) {
        const json& jn = meta.at("indenter");
        map.meta.indenter =
            IndenterShape(jn.at("lambda_exp").get<double>(), jn.at("A").get<double>());
    }
    if (meta.contains("inclusion")) {
        const json& ji = meta.at("inclusion");
        map.meta.inclusion = InclusionParams(
            ji.at("d").get<double>(),
            {ji.at("x0")[0].get<double>(), ji.at("x0")[1].get<double>()},
            ji.at("r_eps").get<double>(), ji.at("alpha").get<double>(),
            ji.at("nu0").get<double>());
    }
    return map;
}

// ---- Fit-result JSON ------------------------------------------------------

/// Fit result as stored on disk; `w` is carried over from the map
/// metadata so extraction can verify the protocol was recorded.
struct FitRecord {
    FitResult fit;
    std::optional<double> w;
};

inline json to_json(const FitResult& f) {
    json j{{"s0", f.params.s0},
           {"c0", f.params.c0},
           {"d", f.params.d},
           {"x10", f.params.x10},
           {"x20", f.params.x20},
           {"rss", f.rss},
           {"iterations", f.iterations},
           {"converged", f.converged},
           {"ci",
            {{"s0", f.ci[0]}, {"c0", f.ci[1]}, {"d", f.ci[2]}, {"x10", f.ci[3]},
             {"x20", f.ci[4]}}}};
    if (!f.note.empty()) j["note"] = f.note;
    return j;
}

inline void save_fit(const FitRecord& rec, const std::filesystem::path& path) {
    json j = to_json(rec.fit);
    if (rec.w) j["w"] = *rec.w;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write fit file: " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline FitRecord load_fit(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open fit file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("fit JSON parse error in " + path.string() + ": " + e.what());
    }
    FitRecord rec;
    rec.fit.params = {j.at("s0").get<double>(), j.at("c0").get<double>(), j.at("d").get<double>(),
                      j.at("x10").get<double>(), j.at("x20").get<double>()};
    rec.fit.rss = j.at("rss").get<double>();
    rec.fit.iterations = j.at("iterations").get<int>();
    rec.fit.converged = j.at("converged").get<bool>();
    if (j.contains("ci")) {
        const json& c = j.at("ci");
        rec.fit.ci = {c.value("s0", 0.0), c.value("c0", 0.0), c.value("d", 0.0),
                      c.value("x10", 0.0), c.value("x20", 0.0)};
    }
    if (j.contains("note")) rec.fit.note = j.at("note").get<std::string>();
    if (j.contains("w")) rec.w = j.at("w").get<double>();
    return rec;
}

inline json to_json(const Extraction& ex) {
    return json{{"alpha", ex.alpha},
                {"v_eps", ex.v_eps},
                {"q", ex.q},
                {"q_times_v", ex.q_times_v},
                {"normalization", ex.paper_normalization ? "paper" : "canonical"},
                {"warnings", ex.warnings}};
}

}  // namespace istomo

#endif  // ISTOMO_IO_HPP
