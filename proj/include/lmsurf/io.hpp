#pragma once

// Mesh, table and report formats: OBJ (v/f records), CSV with per-node forms,
// and JSON for cubic coefficient maps and reports.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "field.hpp"
#include "geometry.hpp"
#include "polynomial.hpp"
#include "weierstrass.hpp"

namespace lmsurf {

inline constexpr int report_schema_version = 1;

// Malformed input files.
class FormatError : public Error {
public:
    using Error::Error;
};

// 17 significant digits: reading the text back gives the same double.
inline std::string format_g17(double x)
{
    if (std::isnan(x)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// OBJ

struct ObjMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::size_t, 3>> faces;  // zero-based
};

// Valid samples in grid order; each grid cell becomes two triangles, dropped
// when a corner is invalid.
inline ObjMesh patch_mesh(const SurfacePatch& patch)
{
    ObjMesh mesh;
    std::vector<std::size_t> id(patch.points.size(), 0);
    for (int j = 0; j < patch.grid.nv; ++j) {
        for (int i = 0; i < patch.grid.nu; ++i) {
            if (patch.is_valid(i, j)) {
                id[patch.index(i, j)] = mesh.vertices.size();
                mesh.vertices.push_back(patch.point(i, j));
            }
        }
    }
    const auto tri = [&](std::pair<int, int> a, std::pair<int, int> b, std::pair<int, int> c) {
        for (const auto& [i, j] : {a, b, c}) {
            if (!patch.is_valid(i, j)) {
                return;
            }
        }
        mesh.faces.push_back({id[patch.index(a.first, a.second)], id[patch.index(b.first, b.second)],
                              id[patch.index(c.first, c.second)]});
    };
    for (int j = 0; j + 1 < patch.grid.nv; ++j) {
        for (int i = 0; i + 1 < patch.grid.nu; ++i) {
            tri({i, j}, {i + 1, j}, {i + 1, j + 1});
            tri({i, j}, {i + 1, j + 1}, {i, j + 1});
        }
    }
    return mesh;
}

inline void write_obj(std::ostream& out, const ObjMesh& mesh)
{
    for (const auto& p : mesh.vertices) {
        out << "v " << format_g17(p[0]) << ' ' << format_g17(p[1]) << ' ' << format_g17(p[2]) << '\n';
    }
    for (const auto& f : mesh.faces) {
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    }
}

inline void write_obj(std::ostream& out, const SurfacePatch& patch) { write_obj(out, patch_mesh(patch)); }

inline ObjMesh read_obj(std::istream& in)
{
    ObjMesh mesh;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag[0] == '#') {
            continue;
        }
        if (tag == "v") {
            Vec3 p{};
            std::string s[3];
            if (!(ss >> s[0] >> s[1] >> s[2])) {
                throw FormatError("obj line " + std::to_string(lineno) + ": vertex needs three coordinates");
            }
            for (std::size_t k = 0; k < 3; ++k) {
                p[k] = std::strtod(s[k].c_str(), nullptr);
            }
            mesh.vertices.push_back(p);
        }
        else if (tag == "f") {
            std::vector<std::size_t> idx;
            std::string tok;
            while (ss >> tok) {
                const long v = std::strtol(tok.c_str(), nullptr, 10);  // "7/3/2" reads as 7
                if (v <= 0 || static_cast<std::size_t>(v) > mesh.vertices.size()) {
                    throw FormatError("obj line " + std::to_string(lineno) + ": bad vertex index " + tok);
                }
                idx.push_back(static_cast<std::size_t>(v - 1));
            }
            for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
                mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
            }
        }
    }
    return mesh;
}

// ---------------------------------------------------------------------------
// CSV: u,v,x1,x2,x3,E,F,G,L,M,N,K,H per node; forms are nan where unavailable.

inline const std::vector<std::string>& csv_columns()
{
    static const std::vector<std::string> cols{"u", "v", "x1", "x2", "x3", "E", "F", "G", "L", "M", "N", "K", "H"};
    return cols;
}

inline void write_csv(std::ostream& out, const SurfacePatch& patch, const FormsOptions& opt = {})
{
    const FormsField field = compute_all_forms(patch, opt);
    const auto& cols = csv_columns();
    for (std::size_t k = 0; k < cols.size(); ++k) {
        out << (k ? "," : "") << cols[k];
    }
    out << '\n';
    for (int j = 0; j < patch.grid.nv; ++j) {
        for (int i = 0; i < patch.grid.nu; ++i) {
            std::vector<double> row{patch.u_at(i), patch.v_at(j)};
            const bool ok = patch.is_valid(i, j);
            for (std::size_t k = 0; k < 3; ++k) {
                row.push_back(ok ? patch.point(i, j)[k] : nan_value);
            }
            const auto& ff = field.at(i, j);
            const auto& cv = field.curvature_at(i, j);
            for (double x : {ff ? ff->E : nan_value, ff ? ff->F : nan_value, ff ? ff->G : nan_value,
                             ff ? ff->L : nan_value, ff ? ff->M : nan_value, ff ? ff->N : nan_value,
                             cv ? cv->K : nan_value, cv ? cv->H : nan_value}) {
                row.push_back(x);
            }
            for (std::size_t k = 0; k < row.size(); ++k) {
                out << (k ? "," : "") << format_g17(row[k]);
            }
            out << '\n';
        }
    }
}

// Rebuilds the sampled patch (points only) from a CSV table. The (u, v) columns
// must form a complete uniform lattice; rows with a nan coordinate are invalid.
inline SurfacePatch read_csv_patch(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("csv: empty input");
    }
    std::map<std::string, std::size_t> col;
    {
        std::istringstream ss(line);
        std::string name;
        for (std::size_t k = 0; std::getline(ss, name, ','); ++k) {
            name.erase(std::remove_if(name.begin(), name.end(), [](unsigned char c) { return std::isspace(c); }),
                       name.end());
            col[name] = k;
        }
    }
    for (const char* need : {"u", "v", "x1", "x2", "x3"}) {
        if (!col.count(need)) {
            throw FormatError(std::string("csv: missing column ") + need);
        }
    }
    struct Row {
        double u, v;
        Vec3 x;
    };
    std::vector<Row> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::vector<double> cells;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double x = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) {
                throw FormatError("csv line " + std::to_string(lineno) + ": not a number: '" + cell + "'");
            }
            cells.push_back(x);
        }
        const auto get = [&](const char* name) {
            const std::size_t k = col.at(name);
            if (k >= cells.size()) {
                throw FormatError("csv line " + std::to_string(lineno) + ": too few cells");
            }
            return cells[k];
        };
        rows.push_back({get("u"), get("v"), {get("x1"), get("x2"), get("x3")}});
    }
    const auto axis = [&](auto pick) {
        std::vector<double> vals;
        for (const auto& r : rows) {
            vals.push_back(pick(r));
        }
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        return vals;
    };
    const auto us = axis([](const Row& r) { return r.u; });
    const auto vs = axis([](const Row& r) { return r.v; });
    if (us.size() < 3 || vs.size() < 3 || us.size() * vs.size() != rows.size()) {
        throw FormatError("csv: (u, v) columns do not form a complete lattice of at least 3x3");
    }
    SurfacePatch patch;
    patch.domain = {us.front(), us.back(), vs.front(), vs.back()};
    patch.grid = {static_cast<int>(us.size()), static_cast<int>(vs.size())};
    patch.hu = (us.back() - us.front()) / (patch.grid.nu - 1);
    patch.hv = (vs.back() - vs.front()) / (patch.grid.nv - 1);
    for (std::size_t k = 0; k < us.size(); ++k) {
        if (std::abs(us[k] - patch.u_at(static_cast<int>(k))) > 1e-9 * std::max(1.0, std::abs(us[k]))) {
            throw FormatError("csv: u values are not uniformly spaced");
        }
    }
    for (std::size_t k = 0; k < vs.size(); ++k) {
        if (std::abs(vs[k] - patch.v_at(static_cast<int>(k))) > 1e-9 * std::max(1.0, std::abs(vs[k]))) {
            throw FormatError("csv: v values are not uniformly spaced");
        }
    }
    patch.points.assign(rows.size(), Vec3{});
    patch.valid.assign(rows.size(), 0);
    for (const auto& r : rows) {
        const auto i = static_cast<int>(std::lower_bound(us.begin(), us.end(), r.u) - us.begin());
        const auto j = static_cast<int>(std::lower_bound(vs.begin(), vs.end(), r.v) - vs.begin());
        const std::size_t k = patch.index(i, j);
        patch.points[k] = r.x;
        patch.valid[k] = std::isfinite(r.x[0]) && std::isfinite(r.x[1]) && std::isfinite(r.x[2]) ? 1 : 0;
    }
    return patch;
}

// ---------------------------------------------------------------------------
// JSON

// {"x1": {"(i,j)": c, ...}, "x2": {...}, "x3": {...}}; absent components are zero.
inline CubicParametrization cubic_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) {
        throw FormatError("cubic: expected an object with keys x1, x2, x3");
    }
    static const std::regex key_re(R"(\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*)");
    CubicParametrization x;
    for (const auto& [name, body] : j.items()) {
        std::size_t k = 0;
        if (name == "x1") {
            k = 0;
        }
        else if (name == "x2") {
            k = 1;
        }
        else if (name == "x3") {
            k = 2;
        }
        else {
            throw FormatError("cubic: unexpected key '" + name + "'");
        }
        if (!body.is_object()) {
            throw FormatError("cubic: " + name + " must map \"(i,j)\" to numbers");
        }
        for (const auto& [mono, c] : body.items()) {
            std::smatch m;
            if (!std::regex_match(mono, m, key_re)) {
                throw FormatError("cubic: bad monomial key '" + mono + "' (expected \"(i,j)\")");
            }
            if (!c.is_number()) {
                throw FormatError("cubic: coefficient of " + mono + " in " + name + " is not a number");
            }
            const int a = std::stoi(m[1]);
            const int b = std::stoi(m[2]);
            if (a + b > 3) {
                throw FormatError("cubic: monomial " + mono + " has total degree above 3");
            }
            x.x[k].add(a, b, c.get<double>());
        }
    }
    return x;
}

inline nlohmann::json to_json(const CubicParametrization& x)
{
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t k = 0; k < 3; ++k) {
        nlohmann::json body = nlohmann::json::object();
        for (const auto& [m, c] : x.x[k].terms()) {
            body["(" + std::to_string(m.first) + "," + std::to_string(m.second) + ")"] = c;
        }
        j["x" + std::to_string(k + 1)] = body;
    }
    return j;
}

// NaN and infinities become null.
inline nlohmann::json json_number(double x)
{
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

inline nlohmann::json to_json(const Rect& r)
{
    return {json_number(r.u_min), json_number(r.u_max), json_number(r.v_min), json_number(r.v_max)};
}

inline nlohmann::json to_json(const Vec3& v) { return {json_number(v[0]), json_number(v[1]), json_number(v[2])}; }

inline nlohmann::json to_json(const SplitComplex& z) { return to_string(z); }

inline nlohmann::json to_json(const Mat3& m) { return {to_json(m[0]), to_json(m[1]), to_json(m[2])}; }

} // namespace lmsurf
