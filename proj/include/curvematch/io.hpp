#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "curvematch/curve.hpp"

namespace curvematch {

namespace detail {

// Shortest representation that round-trips doubles exactly.
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline ManifoldId parse_manifold(const std::string& tag) {
    if (tag == "plane") return ManifoldId::Plane;
    if (tag == "h2") return ManifoldId::HyperbolicHalfPlane;
    if (tag == "s2") return ManifoldId::Sphere;
    throw IoError("unknown manifold tag: " + tag);
}

inline bool blank_or_comment(const std::string& line) {
    for (char ch : line) {
        if (ch == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(ch))) return false;
    }
    return true;
}

inline std::vector<double> parse_numbers(const std::string& line) {
    std::vector<double> out;
    std::istringstream is(line);
    double v;
    while (is >> v) out.push_back(v);
    if (!is.eof()) throw IoError("malformed numeric row: " + line);
    return out;
}

struct HeaderReader {
    std::ifstream in;
    explicit HeaderReader(const std::string& file) : in(file) {
        if (!in) throw IoError("cannot open " + file);
    }
    // Next meaningful line, or empty string at EOF.
    std::string next() {
        std::string line;
        while (std::getline(in, line))
            if (!blank_or_comment(line)) return line;
        return {};
    }
};

inline std::string header_value(const std::string& line, const std::string& key) {
    auto pos = line.find(':');
    if (pos == std::string::npos || line.substr(0, pos) != key)
        throw IoError("expected '" + key + ":' header, got: " + line);
    auto v = line.substr(pos + 1);
    auto b = v.find_first_not_of(" \t");
    auto e = v.find_last_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return v.substr(b, e - b + 1);
}

}  // namespace detail

struct CurveFile {
    DiscreteCurve curve;
    std::string name;
};

inline void write_curve_file(const std::string& file, const DiscreteCurve& c,
                             const std::string& name = {}) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file);
    out << "manifold: " << manifold_name(c.manifold()) << "\n";
    if (!name.empty()) out << "name: " << name << "\n";
    const int dim = ambient_dim(c.manifold());
    for (std::size_t i = 0; i < c.samples(); ++i) {
        out << detail::fmt_double(c[i].x) << ' ' << detail::fmt_double(c[i].y);
        if (dim == 3) out << ' ' << detail::fmt_double(c[i].z);
        out << "\n";
    }
}

inline CurveFile read_curve_file(const std::string& file) {
    detail::HeaderReader r(file);
    std::string line = r.next();
    if (line.empty()) throw IoError(file + ": missing manifold header");
    ManifoldId mfd = detail::parse_manifold(detail::header_value(line, "manifold"));
    std::string name;
    std::vector<Vec3> pts;
    const int dim = ambient_dim(mfd);
    while (!(line = r.next()).empty()) {
        if (line.find("name:") == 0) {
            name = detail::header_value(line, "name");
            continue;
        }
        auto nums = detail::parse_numbers(line);
        if (static_cast<int>(nums.size()) != dim)
            throw IoError(file + ": coordinate row arity " + std::to_string(nums.size()) +
                          " does not match manifold " + manifold_name(mfd));
        pts.emplace_back(nums[0], nums[1], dim == 3 ? nums[2] : 0.0);
    }
    try {
        return CurveFile{DiscreteCurve(mfd, std::move(pts)), std::move(name)};
    } catch (const std::exception& e) {
        throw IoError(file + ": " + e.what());
    }
}

inline void write_path_file(const std::string& file, const CurvePath& p) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file);
    out << "manifold: " << manifold_name(p.manifold()) << "\n";
    out << "rows: " << p.rows() << "\n";
    out << "cols: " << p.cols() << "\n";
    const int dim = ambient_dim(p.manifold());
    for (std::size_t k = 0; k < p.rows(); ++k)
        for (std::size_t i = 0; i < p.cols(); ++i) {
            const Vec3& v = p.at(k, i);
            out << detail::fmt_double(v.x) << ' ' << detail::fmt_double(v.y);
            if (dim == 3) out << ' ' << detail::fmt_double(v.z);
            out << "\n";
        }
}

inline CurvePath read_path_file(const std::string& file) {
    detail::HeaderReader r(file);
    ManifoldId mfd = detail::parse_manifold(detail::header_value(r.next(), "manifold"));
    std::size_t rows = std::stoul(detail::header_value(r.next(), "rows"));
    std::size_t cols = std::stoul(detail::header_value(r.next(), "cols"));
    const int dim = ambient_dim(mfd);
    std::vector<Vec3> grid;
    grid.reserve(rows * cols);
    std::string line;
    while (!(line = r.next()).empty()) {
        auto nums = detail::parse_numbers(line);
        if (static_cast<int>(nums.size()) != dim) throw IoError(file + ": bad grid row arity");
        grid.emplace_back(nums[0], nums[1], dim == 3 ? nums[2] : 0.0);
    }
    if (grid.size() != rows * cols) throw IoError(file + ": grid size does not match header");
    return CurvePath(mfd, rows, cols, std::move(grid));
}

inline void write_diffeo_file(const std::string& file, const Diffeo& d) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file);
    out << "diffeo: " << d.values().size() << "\n";
    for (double v : d.values()) out << detail::fmt_double(v) << "\n";
}

inline Diffeo read_diffeo_file(const std::string& file) {
    detail::HeaderReader r(file);
    std::size_t count = std::stoul(detail::header_value(r.next(), "diffeo"));
    std::vector<double> vals;
    vals.reserve(count);
    std::string line;
    while (!(line = r.next()).empty())
        for (double v : detail::parse_numbers(line)) vals.push_back(v);
    if (vals.size() != count) throw IoError(file + ": diffeo sample count mismatch");
    return Diffeo(std::move(vals));
}

inline void write_scalar_grid_file(const std::string& file,
                                   const std::vector<std::vector<double>>& grid) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file);
    out << "scalars: " << grid.size() << ' ' << (grid.empty() ? 0 : grid.front().size()) << "\n";
    for (const auto& row : grid) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? " " : "") << detail::fmt_double(row[i]);
        out << "\n";
    }
}

struct LengthsRow {
    std::string label;
    double parameterized_length;
    double horizontal_length;
};

inline void write_lengths_csv(const std::string& file, const std::vector<LengthsRow>& rows) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file);
    out << "label,parameterized_length,horizontal_length\n";
    for (const auto& r : rows)
        out << r.label << ',' << detail::fmt_double(r.parameterized_length) << ','
            << detail::fmt_double(r.horizontal_length) << "\n";
}

inline void write_scalar_series_file(const std::string& file, const std::string& key,
                                     const std::vector<double>& values) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file);
    out << key << ": " << values.size() << "\n";
    for (double v : values) out << detail::fmt_double(v) << "\n";
}

}  // namespace curvematch
