#pragma once

// SVG overlay of contours on a grayscale rendering of the field, and a PGM
// dump of the rasterised field.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "snake/contour.hpp"
#include "snake/potential.hpp"

namespace snake {

struct LabeledContour {
    Contour contour;
    std::string label;
};

namespace detail {

struct FieldRaster {
    int cols = 0;
    int rows = 0;
    std::vector<double> gray;  ///< row-major, 0 = min value, 1 = max value, row 0 at the top
};

inline FieldRaster raster_for_display(const ScalarField& field, int cols) {
    const Domain& d = field.domain();
    const double w = d.max.x() - d.min.x(), h = d.max.y() - d.min.y();
    FieldRaster r;
    r.cols = cols;
    r.rows = std::max(1, static_cast<int>(std::lround(cols * h / w)));
    r.gray.resize(static_cast<std::size_t>(r.cols) * r.rows);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int j = 0; j < r.rows; ++j) {
        for (int i = 0; i < r.cols; ++i) {
            const Vec2 p(d.min.x() + w * (i + 0.5) / r.cols, d.max.y() - h * (j + 0.5) / r.rows);
            const double v = field.value(p);
            r.gray[static_cast<std::size_t>(j) * r.cols + i] = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (double& g : r.gray) g = (g - lo) / span;
    return r;
}

}  // namespace detail

/// Writes an SVG 1.1 document 800 px wide. Closed contours repeat their first
/// point so the polyline closes.
inline void render_overlay(const ScalarField& field, const std::vector<LabeledContour>& contours,
                           const std::filesystem::path& path, int raster_cols = 80) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write overlay '" + path.string() + "'");
    const Domain& d = field.domain();
    const double w = d.max.x() - d.min.x(), h = d.max.y() - d.min.y();
    const double scale = 800.0 / w;
    const double height = h * scale;
    auto sx = [&](double x) { return format_double((x - d.min.x()) * scale); };
    auto sy = [&](double y) { return format_double((d.max.y() - y) * scale); };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\""
       << format_double(height) << "\" viewBox=\"0 0 800 " << format_double(height) << "\">\n"
       << "<!-- field: " << to_string(field.kind()) << " -->\n"
       << "<g id=\"field\" shape-rendering=\"crispEdges\">\n";
    const detail::FieldRaster r = detail::raster_for_display(field, raster_cols);
    const double cw = 800.0 / r.cols, ch = height / r.rows;
    for (int j = 0; j < r.rows; ++j) {
        for (int i = 0; i < r.cols; ++i) {
            const int g = static_cast<int>(std::lround(255.0 * r.gray[static_cast<std::size_t>(j) * r.cols + i]));
            os << "<rect x=\"" << format_double(i * cw) << "\" y=\"" << format_double(j * ch) << "\" width=\""
               << format_double(cw) << "\" height=\"" << format_double(ch) << "\" fill=\"rgb(" << g << ',' << g
               << ',' << g << ")\"/>\n";
        }
    }
    os << "</g>\n";

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#17becf"};
    for (std::size_t k = 0; k < contours.size(); ++k) {
        const Contour& c = contours[k].contour;
        os << "<!-- contour " << k << ": " << contours[k].label << " (" << to_string(c.topology) << ", "
           << c.size() << " points) -->\n";
        os << "<polyline fill=\"none\" stroke=\"" << colors[k % 6] << "\" stroke-width=\"2\" data-closed=\""
           << (c.topology == Topology::closed ? "true" : "false") << "\" points=\"";
        for (int i = 0; i < c.size(); ++i) {
            os << (i ? " " : "") << sx(c.points[i].x()) << ',' << sy(c.points[i].y());
        }
        if (c.topology == Topology::closed && c.size() > 0) {
            os << ' ' << sx(c.points[0].x()) << ',' << sy(c.points[0].y());
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
    if (!os) throw Error("failed writing overlay '" + path.string() + "'");
}

/// 8-bit P5 dump of the field, min value black and max value white.
inline void write_field_pgm(const ScalarField& field, const std::filesystem::path& path, int cols = 256) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write '" + path.string() + "'");
    const detail::FieldRaster r = detail::raster_for_display(field, cols);
    os << "P5\n" << r.cols << ' ' << r.rows << "\n255\n";
    for (double g : r.gray) os.put(static_cast<char>(std::lround(255.0 * g)));
    if (!os) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace snake
