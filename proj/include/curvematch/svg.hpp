#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "curvematch/curve.hpp"

namespace curvematch {

struct PlotOptions {
    double width = 640;
    double height = 640;
    double margin = 0.06;  // fraction of the drawing area
};

namespace detail {

inline std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Orthographic x/y for the sphere, chart coordinates otherwise.
inline Vec3 plot_project(ManifoldId m, const Vec3& p) {
    (void)m;
    return p;  // z carries visibility information for the sphere
}

}  // namespace detail

/// Render point trajectories of one or more curve paths as an SVG document.
/// The first path is drawn blue, the second red, further paths gray; the
/// boundary rows are emphasized. Sphere paths are shown in orthographic
/// projection with the hidden hemisphere dimmed.
inline std::string render_svg(const std::vector<CurvePath>& paths, const PlotOptions& opt = {}) {
    if (paths.empty()) throw ContractViolation("nothing to plot");
    ManifoldId mfd = paths.front().manifold();
    for (const auto& p : paths)
        if (p.manifold() != mfd) throw ContractViolation("cannot mix manifolds in one plot");

    double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
    if (mfd == ManifoldId::Sphere) {
        minx = miny = -1.05;
        maxx = maxy = 1.05;
    } else {
        for (const auto& p : paths)
            for (const auto& v : p.flat()) {
                minx = std::min(minx, v.x);
                maxx = std::max(maxx, v.x);
                miny = std::min(miny, v.y);
                maxy = std::max(maxy, v.y);
            }
        if (mfd == ManifoldId::HyperbolicHalfPlane) miny = std::min(miny, 0.0);
        double pad = 1e-6 + 0.02 * std::max(maxx - minx, maxy - miny);
        minx -= pad; maxx += pad; miny -= pad; maxy += pad;
    }
    double spanx = maxx - minx, spany = maxy - miny;
    double inw = opt.width * (1 - 2 * opt.margin), inh = opt.height * (1 - 2 * opt.margin);
    double scale = std::min(inw / spanx, inh / spany);
    double offx = opt.margin * opt.width, offy = opt.margin * opt.height;
    auto X = [&](double x) { return offx + (x - minx) * scale; };
    auto Y = [&](double y) { return offy + (maxy - y) * scale; };

    static const char* kPalette[] = {"#1f77b4", "#d62728", "#7f7f7f"};
    std::string svg;
    char head[256];
    std::snprintf(head, sizeof head,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                  "viewBox=\"0 0 %g %g\">\n",
                  opt.width, opt.height, opt.width, opt.height);
    svg += head;
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (mfd == ManifoldId::Sphere) {
        svg += "<circle cx=\"" + detail::fmt_coord(X(0)) + "\" cy=\"" + detail::fmt_coord(Y(0)) +
               "\" r=\"" + detail::fmt_coord(scale) +
               "\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
    }
    if (mfd == ManifoldId::HyperbolicHalfPlane && miny <= 0) {
        svg += "<line x1=\"" + detail::fmt_coord(X(minx)) + "\" y1=\"" + detail::fmt_coord(Y(0)) +
               "\" x2=\"" + detail::fmt_coord(X(maxx)) + "\" y2=\"" + detail::fmt_coord(Y(0)) +
               "\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
    }

    auto polyline = [&](const std::vector<Vec3>& pts, const char* color, double width,
                        double opacity) {
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"" + detail::fmt_coord(width) + "\" stroke-opacity=\"" +
               detail::fmt_coord(opacity) + "\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) svg += ' ';
            svg += detail::fmt_coord(X(pts[i].x)) + "," + detail::fmt_coord(Y(pts[i].y));
        }
        svg += "\"/>\n";
    };

    for (std::size_t pi = 0; pi < paths.size(); ++pi) {
        const CurvePath& path = paths[pi];
        const char* color = kPalette[std::min<std::size_t>(pi, 2)];
        // per-point trajectories across s
        for (std::size_t i = 0; i < path.cols(); ++i) {
            std::vector<Vec3> traj(path.rows());
            double zmean = 0;
            for (std::size_t k = 0; k < path.rows(); ++k) {
                traj[k] = detail::plot_project(mfd, path.at(k, i));
                zmean += path.at(k, i).z;
            }
            zmean /= static_cast<double>(path.rows());
            double opacity = (mfd == ManifoldId::Sphere && zmean < 0) ? 0.2 : 0.55;
            polyline(traj, color, 0.9, opacity);
        }
        // boundary curves, emphasized
        for (std::size_t k : {std::size_t{0}, path.rows() - 1}) {
            std::vector<Vec3> row(path.cols());
            double zmean = 0;
            for (std::size_t i = 0; i < path.cols(); ++i) {
                row[i] = detail::plot_project(mfd, path.at(k, i));
                zmean += path.at(k, i).z;
            }
            zmean /= static_cast<double>(path.cols());
            double opacity = (mfd == ManifoldId::Sphere && zmean < 0) ? 0.35 : 1.0;
            polyline(row, color, 2.4, opacity);
        }
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace curvematch
