#pragma once

// External potential P: synthetic analytic fields, PGM images and edge maps,
// pointwise derivatives, and the polar-frame quantities used by the
// convexity certificate.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "snake/error.hpp"

namespace snake {

enum class FieldKind { quadratic, gaussian, annulus, grid };

inline std::string_view to_string(FieldKind kind) {
    switch (kind) {
        case FieldKind::quadratic: return "quadratic";
        case FieldKind::gaussian: return "gaussian";
        case FieldKind::annulus: return "annulus";
        case FieldKind::grid: return "grid";
    }
    return "unknown";
}

struct Domain {
    Vec2 min{-10.0, -10.0};
    Vec2 max{10.0, 10.0};

    bool contains(Vec2 p) const {
        return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() && p.y() <= max.y();
    }
    double diagonal() const { return (max - min).norm(); }
};

/// Parameters of an analytic field.
///   quadratic: P = k/2 |x - c|^2
///   gaussian:  P = -amplitude * exp(-|x - c|^2 / (2 width^2))
///   annulus:   P = k/2 (|x - c| - radius)^2
struct SyntheticSpec {
    FieldKind kind = FieldKind::quadratic;
    Vec2 center = Vec2::Zero();
    double k = 1.0;
    double amplitude = 1.0;
    double width = 1.0;
    double radius = 1.0;
    Domain domain{};
};

struct FieldSample {
    double value = 0.0;
    Vec2 grad = Vec2::Zero();
    Mat2 hessian = Mat2::Zero();
};

class ScalarField {
public:
    /// Lattice node (row, col) sits at origin + spacing * (col, row).
    static ScalarField from_grid(int width, int height, double spacing, std::vector<double> values,
                                 Vec2 origin = Vec2::Zero()) {
        // 2-pixel grids still interpolate; derivative sampling needs 3
        if (width < 2 || height < 2) {
            throw InvalidSpecError("grid field needs width >= 2 and height >= 2");
        }
        if (!(spacing > 0.0) || !std::isfinite(spacing)) {
            throw InvalidSpecError("grid spacing must be positive and finite");
        }
        if (values.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
            throw InvalidSpecError("grid value count does not match width * height");
        }
        ScalarField f;
        f.spec_.kind = FieldKind::grid;
        f.width_ = width;
        f.height_ = height;
        f.spacing_ = spacing;
        f.values_ = std::move(values);
        f.spec_.domain.min = origin;
        f.spec_.domain.max = origin + spacing * Vec2(width - 1, height - 1);
        return f;
    }

    static ScalarField synthetic(const SyntheticSpec& spec) {
        auto finite = [](double v) { return std::isfinite(v); };
        if (spec.kind == FieldKind::grid) {
            throw InvalidSpecError("synthetic spec cannot have grid kind");
        }
        if (!finite(spec.center.x()) || !finite(spec.center.y()) || !finite(spec.k) ||
            !finite(spec.amplitude)) {
            throw InvalidSpecError("synthetic field parameters must be finite");
        }
        if (spec.kind == FieldKind::gaussian && !(spec.width > 0.0 && finite(spec.width))) {
            throw InvalidSpecError("gaussian width must be positive and finite");
        }
        if (spec.kind == FieldKind::annulus && !(spec.radius > 0.0 && finite(spec.radius))) {
            throw InvalidSpecError("annulus radius must be positive and finite");
        }
        const Domain& d = spec.domain;
        if (!(d.max.x() > d.min.x() && d.max.y() > d.min.y()) || !finite(d.diagonal())) {
            throw InvalidSpecError("field domain must be a finite non-empty rectangle");
        }
        ScalarField f;
        f.spec_ = spec;
        return f;
    }

    FieldKind kind() const { return spec_.kind; }
    bool is_grid() const { return spec_.kind == FieldKind::grid; }
    const Domain& domain() const { return spec_.domain; }
    const SyntheticSpec& synthetic_spec() const { return spec_; }

    int width() const { return width_; }
    int height() const { return height_; }
    double spacing() const { return spacing_; }
    const std::vector<double>& values() const { return values_; }
    double at(int row, int col) const {
        return values_[static_cast<std::size_t>(row) * width_ + col];
    }

    /// Region in which sample() (gradient and Hessian) is defined.
    Domain derivative_domain() const {
        if (!is_grid()) return spec_.domain;
        return Domain{spec_.domain.min + Vec2::Constant(spacing_),
                      spec_.domain.max - Vec2::Constant(spacing_)};
    }

    double value(Vec2 p) const {
        if (!spec_.domain.contains(p) || !p.allFinite()) {
            throw DomainError("point " + format_point(p) + " outside field domain", p);
        }
        if (!is_grid()) return analytic(p).value;
        const Vec2 u = (p - spec_.domain.min) / spacing_;
        const auto [c0, fx] = cell(u.x(), 0, width_ - 2);
        const auto [r0, fy] = cell(u.y(), 0, height_ - 2);
        return (1 - fy) * ((1 - fx) * at(r0, c0) + fx * at(r0, c0 + 1)) +
               fy * ((1 - fx) * at(r0 + 1, c0) + fx * at(r0 + 1, c0 + 1));
    }

    FieldSample sample(Vec2 p) const {
        if (is_grid() && (width_ < 3 || height_ < 3)) {
            throw PreconditionError("derivatives need a grid of at least 3 x 3 pixels");
        }
        if (!derivative_domain().contains(p) || !p.allFinite()) {
            throw DomainError("point " + format_point(p) + " outside field derivative domain", p);
        }
        if (!is_grid()) return analytic(p);

        FieldSample out;
        out.value = value(p);
        const Vec2 u = (p - spec_.domain.min) / spacing_;
        const auto [c0, fx] = cell(u.x(), 1, std::max(1, width_ - 3));
        const auto [r0, fy] = cell(u.y(), 1, std::max(1, height_ - 3));
        const double weights[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
        const int rows[4] = {r0, r0, r0 + 1, r0 + 1};
        const int cols[4] = {c0, c0 + 1, c0, c0 + 1};
        double gx = 0, gy = 0, hxx = 0, hxy = 0, hyy = 0;
        for (int n = 0; n < 4; ++n) {
            if (weights[n] == 0.0) continue;
            const int r = rows[n], c = cols[n];
            const double h = spacing_;
            gx += weights[n] * (at(r, c + 1) - at(r, c - 1)) / (2 * h);
            gy += weights[n] * (at(r + 1, c) - at(r - 1, c)) / (2 * h);
            hxx += weights[n] * (at(r, c + 1) - 2 * at(r, c) + at(r, c - 1)) / (h * h);
            hyy += weights[n] * (at(r + 1, c) - 2 * at(r, c) + at(r - 1, c)) / (h * h);
            hxy += weights[n] *
                   (at(r + 1, c + 1) - at(r + 1, c - 1) - at(r - 1, c + 1) + at(r - 1, c - 1)) /
                   (4 * h * h);
        }
        out.grad = Vec2(gx, gy);
        out.hessian << hxx, hxy, hxy, hyy;
        return out;
    }

private:
    // Splits a lattice coordinate into a base node in [lo, hi] and a blend weight.
    static std::pair<int, double> cell(double u, int lo, int hi) {
        int i = static_cast<int>(std::floor(u));
        i = std::clamp(i, lo, hi);
        double f = std::clamp(u - i, 0.0, 1.0);
        return {i, f};
    }

    FieldSample analytic(Vec2 p) const {
        FieldSample s;
        const Vec2 d = p - spec_.center;
        const double rho2 = d.squaredNorm();
        const Mat2 I = Mat2::Identity();
        switch (spec_.kind) {
            case FieldKind::quadratic:
                s.value = 0.5 * spec_.k * rho2;
                s.grad = spec_.k * d;
                s.hessian = spec_.k * I;
                break;
            case FieldKind::gaussian: {
                const double s2 = spec_.width * spec_.width;
                const double e = spec_.amplitude * std::exp(-rho2 / (2 * s2));
                s.value = -e;
                s.grad = (e / s2) * d;
                s.hessian = (e / s2) * (I - d * d.transpose() / s2);
                break;
            }
            case FieldKind::annulus: {
                const double rho = std::sqrt(rho2);
                const double dr = rho - spec_.radius;
                s.value = 0.5 * spec_.k * dr * dr;
                if (rho == 0.0) {
                    // Apex of the cone: only the radial curvature is defined.
                    s.hessian = spec_.k * I;
                    break;
                }
                const Vec2 n = d / rho;
                const Mat2 nn = n * n.transpose();
                s.grad = spec_.k * dr * n;
                s.hessian = spec_.k * (nn + (dr / rho) * (I - nn));
                break;
            }
            case FieldKind::grid: break;
        }
        // Store a single triangle so the result is exactly symmetric.
        s.hessian(0, 1) = s.hessian(1, 0);
        return s;
    }

    SyntheticSpec spec_{};
    int width_ = 0;
    int height_ = 0;
    double spacing_ = 1.0;
    std::vector<double> values_;
};

inline ScalarField build_synthetic(const SyntheticSpec& spec) { return ScalarField::synthetic(spec); }

/// Samples any field onto a lattice covering its domain.
inline ScalarField rasterize(const ScalarField& field, double spacing) {
    const Domain& d = field.domain();
    const int w = static_cast<int>(std::floor((d.max.x() - d.min.x()) / spacing + 1e-9)) + 1;
    const int h = static_cast<int>(std::floor((d.max.y() - d.min.y()) / spacing + 1e-9)) + 1;
    std::vector<double> values(static_cast<std::size_t>(w) * h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            values[static_cast<std::size_t>(r) * w + c] =
                field.value(d.min + spacing * Vec2(c, r));
        }
    }
    return ScalarField::from_grid(w, h, spacing, std::move(values), d.min);
}

// ---------------------------------------------------------------------------
// PGM reader (P2 ASCII and P5 binary)

namespace detail {

class PgmCursor {
public:
    explicit PgmCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t offset() const { return pos_; }
    bool at_end() const { return pos_ >= bytes_.size(); }

    // Skips whitespace and '#' comments, then reads one token.
    std::string header_token(const char* what) {
        skip_space(true);
        if (at_end()) throw ParseError(std::string("unexpected end of data reading ") + what, pos_);
        std::string tok;
        while (!at_end() && !is_space(bytes_[pos_]) && bytes_[pos_] != '#') {
            tok.push_back(static_cast<char>(bytes_[pos_++]));
        }
        return tok;
    }

    long header_int(const char* what) {
        const std::size_t start = pos_;
        std::string tok = header_token(what);
        if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) {
                return std::isdigit(static_cast<unsigned char>(c)) != 0;
            })) {
            throw ParseError(std::string("expected integer for ") + what + ", got '" + tok + "'",
                             start);
        }
        if (tok.size() > 9) throw ParseError(std::string(what) + " out of range", start);
        return std::stol(tok);
    }

    void skip_space(bool comments) {
        while (!at_end()) {
            const auto c = bytes_[pos_];
            if (is_space(c)) {
                ++pos_;
            } else if (comments && c == '#') {
                while (!at_end() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
            } else {
                break;
            }
        }
    }

    std::uint8_t byte() {
        if (at_end()) throw ParseError("truncated pixel data", pos_);
        return bytes_[pos_++];
    }

    static bool is_space(std::uint8_t c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Decodes a P2 or P5 PGM into a grid field with values divided by maxval.
inline ScalarField load_pgm(std::span<const std::uint8_t> bytes, double spacing = 1.0) {
    detail::PgmCursor cur(bytes);
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
        throw ParseError("missing P2/P5 magic number", 0);
    }
    const bool binary = bytes[1] == '5';
    cur.header_token("magic");
    const std::size_t dims_at = cur.offset();
    const long width = cur.header_int("width");
    const long height = cur.header_int("height");
    const std::size_t maxval_at = cur.offset();
    const long maxval = cur.header_int("maxval");
    if (width < 1 || height < 1) throw ParseError("image dimensions must be positive", dims_at);
    if (maxval < 1 || maxval > 65535) throw ParseError("maxval must be in [1, 65535]", maxval_at);
    if (width > 1 << 15 || height > 1 << 15) throw ParseError("image dimensions too large", dims_at);

    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<double> values;
    values.reserve(count);
    if (binary) {
        // Exactly one whitespace byte separates maxval from the raster.
        if (cur.at_end() || !detail::PgmCursor::is_space(cur.byte())) {
            throw ParseError("expected single whitespace after maxval", cur.offset());
        }
        const bool wide = maxval > 255;
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t at = cur.offset();
            unsigned v = cur.byte();
            if (wide) v = (v << 8) | cur.byte();
            if (v > static_cast<unsigned>(maxval)) throw ParseError("sample exceeds maxval", at);
            values.push_back(static_cast<double>(v) / static_cast<double>(maxval));
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            cur.skip_space(true);
            const std::size_t at = cur.offset();
            if (cur.at_end()) throw ParseError("truncated pixel data", at);
            const long v = cur.header_int("sample");
            if (v > maxval) throw ParseError("sample exceeds maxval", at);
            values.push_back(static_cast<double>(v) / static_cast<double>(maxval));
        }
    }
    return ScalarField::from_grid(static_cast<int>(width), static_cast<int>(height), spacing,
                                  std::move(values));
}

inline ScalarField load_pgm(std::string_view text, double spacing = 1.0) {
    return load_pgm(std::span<const std::uint8_t>(
                        reinterpret_cast<const std::uint8_t*>(text.data()), text.size()),
                    spacing);
}

/// P = -|grad(G_sigma * I)|^2 with a truncated Gaussian of radius ceil(3 sigma)
/// and clamped borders. sigma is in length units.
inline ScalarField edge_potential(const ScalarField& image, double sigma) {
    if (!image.is_grid()) throw InvalidSpecError("edge_potential needs a grid image");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw InvalidSpecError("sigma must be finite and >= 0");
    }
    const int w = image.width(), h = image.height();
    const double hs = image.spacing();
    std::vector<double> smooth = image.values();

    const double sigma_px = sigma / hs;
    if (sigma_px > 0.0) {
        const int radius = static_cast<int>(std::ceil(3.0 * sigma_px));
        std::vector<double> kernel(2 * radius + 1);
        double sum = 0.0;
        for (int i = -radius; i <= radius; ++i) {
            kernel[i + radius] = std::exp(-0.5 * i * i / (sigma_px * sigma_px));
            sum += kernel[i + radius];
        }
        for (double& k : kernel) k /= sum;

        std::vector<double> tmp(smooth.size());
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    acc += kernel[i + radius] * smooth[r * w + std::clamp(c + i, 0, w - 1)];
                }
                tmp[r * w + c] = acc;
            }
        }
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    acc += kernel[i + radius] * tmp[std::clamp(r + i, 0, h - 1) * w + c];
                }
                smooth[r * w + c] = acc;
            }
        }
    }

    std::vector<double> out(smooth.size());
    auto px = [&](int r, int c) {
        return smooth[std::clamp(r, 0, h - 1) * w + std::clamp(c, 0, w - 1)];
    };
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double gx = (px(r, c + 1) - px(r, c - 1)) / (2 * hs);
            const double gy = (px(r + 1, c) - px(r - 1, c)) / (2 * hs);
            out[r * w + c] = -(gx * gx + gy * gy);
        }
    }
    return ScalarField::from_grid(w, h, hs, std::move(out), image.domain().min);
}

// ---------------------------------------------------------------------------
// Polar frame

/// Below this gradient magnitude the isopotential normal is undefined.
inline constexpr double kGradientFloor = 1e-8;

struct PolarQuantities {
    double r = 0.0;          ///< signed curvature radius; infinite when the isopotential is straight
    bool r_infinite = false;
    double P_r = 0.0;
    double P_rr = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
    double curvature = 0.0;  ///< signed isopotential curvature
};

/// Frame along n = grad P / |grad P|. The curvature radius carries the sign of
/// the isopotential curvature, so e2 > 0 when the centre of curvature attracts.
inline PolarQuantities polar_quantities(const FieldSample& s) {
    const double g = s.grad.norm();
    if (!(g > kGradientFloor)) {
        throw DegenerateFrameError("gradient magnitude " + std::to_string(g) +
                                   " below floor; polar frame undefined");
    }
    const double px = s.grad.x(), py = s.grad.y();
    const double hxx = s.hessian(0, 0), hxy = s.hessian(1, 0), hyy = s.hessian(1, 1);
    PolarQuantities q;
    const Vec2 n = s.grad / g;
    q.P_r = g;
    q.P_rr = n.dot(s.hessian * n);
    q.curvature = (px * px * hyy - 2 * px * py * hxy + py * py * hxx) / (g * g * g);
    q.e1 = 0.5 * q.P_rr;
    if (q.curvature == 0.0) {
        q.r = std::numeric_limits<double>::infinity();
        q.r_infinite = true;
        q.e2 = 0.0;
    } else {
        q.r = 1.0 / q.curvature;
        q.e2 = q.P_r / (2.0 * q.r);
    }
    return q;
}

inline PolarQuantities polar_quantities(const ScalarField& field, Vec2 point) {
    return polar_quantities(field.sample(point));
}

// ---------------------------------------------------------------------------
// Regions

enum class RegionShape { rectangle, disk };

struct Region {
    RegionShape shape = RegionShape::disk;
    Vec2 min = Vec2::Zero();     ///< rectangle
    Vec2 max = Vec2::Zero();     ///< rectangle
    Vec2 center = Vec2::Zero();  ///< disk
    double radius = 0.0;         ///< disk
    int boundary_samples = 64;

    static Region disk(Vec2 c, double r, int samples = 64) {
        Region g;
        g.shape = RegionShape::disk;
        g.center = c;
        g.radius = r;
        g.boundary_samples = samples;
        return g;
    }
    static Region rectangle(Vec2 lo, Vec2 hi, int samples = 64) {
        Region g;
        g.shape = RegionShape::rectangle;
        g.min = lo;
        g.max = hi;
        g.boundary_samples = samples;
        return g;
    }

    bool contains(Vec2 p, double tol = 1e-12) const {
        if (shape == RegionShape::disk) return (p - center).norm() <= radius + tol;
        return p.x() >= min.x() - tol && p.x() <= max.x() + tol && p.y() >= min.y() - tol &&
               p.y() <= max.y() + tol;
    }

    Domain bounding_box() const {
        if (shape == RegionShape::disk) {
            return Domain{center - Vec2::Constant(radius), center + Vec2::Constant(radius)};
        }
        return Domain{min, max};
    }

    /// Evenly spaced points on the boundary curve, boundary_samples in total.
    std::vector<Vec2> boundary_points() const {
        std::vector<Vec2> pts;
        const int n = std::max(boundary_samples, 4);
        pts.reserve(n);
        if (shape == RegionShape::disk) {
            for (int i = 0; i < n; ++i) {
                const double a = 2.0 * std::numbers::pi * i / n;
                pts.emplace_back(center + radius * Vec2(std::cos(a), std::sin(a)));
            }
            return pts;
        }
        const Vec2 size = max - min;
        const double perimeter = 2.0 * (size.x() + size.y());
        for (int i = 0; i < n; ++i) {
            double s = perimeter * i / n;
            if (s < size.x()) { pts.emplace_back(min + Vec2(s, 0)); continue; }
            s -= size.x();
            if (s < size.y()) { pts.emplace_back(Vec2(max.x(), min.y() + s)); continue; }
            s -= size.y();
            if (s < size.x()) { pts.emplace_back(Vec2(max.x() - s, max.y())); continue; }
            s -= size.x();
            pts.emplace_back(Vec2(min.x(), max.y() - s));
        }
        return pts;
    }
};

inline void validate_region(const Region& region, const ScalarField& field) {
    if (region.shape == RegionShape::disk) {
        if (!(region.radius > 0.0) || !std::isfinite(region.radius) || !region.center.allFinite()) {
            throw InvalidSpecError("disk region needs a finite positive radius");
        }
    } else if (!(region.max.x() > region.min.x() && region.max.y() > region.min.y()) ||
               !region.min.allFinite() || !region.max.allFinite()) {
        throw InvalidSpecError("rectangle region must have positive area");
    }
    const Domain box = region.bounding_box();
    if (!field.domain().contains(box.min) || !field.domain().contains(box.max)) {
        throw InvalidSpecError("region does not lie inside the field domain");
    }
}

/// Lattice points inside the region. The lattice is anchored at the field
/// domain corner, so nested regions share their samples.
inline std::vector<Vec2> region_samples(const ScalarField& field, const Region& region,
                                        double grid_step) {
    if (!(grid_step > 0.0) || !std::isfinite(grid_step)) {
        throw InvalidSpecError("grid_step must be positive");
    }
    validate_region(region, field);
    const Domain box = region.bounding_box();
    const Vec2 origin = field.domain().min;
    const long i0 = static_cast<long>(std::ceil((box.min.x() - origin.x()) / grid_step - 1e-9));
    const long i1 = static_cast<long>(std::floor((box.max.x() - origin.x()) / grid_step + 1e-9));
    const long j0 = static_cast<long>(std::ceil((box.min.y() - origin.y()) / grid_step - 1e-9));
    const long j1 = static_cast<long>(std::floor((box.max.y() - origin.y()) / grid_step + 1e-9));
    std::vector<Vec2> pts;
    for (long j = j0; j <= j1; ++j) {
        for (long i = i0; i <= i1; ++i) {
            const Vec2 p = origin + grid_step * Vec2(static_cast<double>(i), static_cast<double>(j));
            if (region.contains(p, 1e-9 * grid_step)) pts.push_back(p);
        }
    }
    if (pts.size() < 9) {
        throw PreconditionError("grid_step too coarse: region holds fewer than 9 samples");
    }
    return pts;
}

/// Default sampling step: one grid spacing, or domain diagonal / 200 for analytic fields.
inline double default_grid_step(const ScalarField& field) {
    return field.is_grid() ? field.spacing() : field.domain().diagonal() / 200.0;
}

struct RegionMinimum {
    double A = 0.0;
    Vec2 argmin = Vec2::Zero();
    long skipped = 0;
    long evaluated = 0;
};

/// Minimum of min(e1, e2) over a lattice sampling of the region. Degenerate
/// frames and points outside the derivative domain are skipped; ties keep the
/// lowest row-major sample.
inline RegionMinimum region_min_A(const ScalarField& field, const Region& region, double grid_step) {
    const auto pts = region_samples(field, region, grid_step);
    const Domain dd = field.derivative_domain();
    RegionMinimum out;
    out.A = std::numeric_limits<double>::infinity();
    bool found = false;
    for (const Vec2& p : pts) {
        if (!dd.contains(p)) {
            ++out.skipped;
            continue;
        }
        const FieldSample s = field.sample(p);
        if (!(s.grad.norm() > kGradientFloor)) {
            ++out.skipped;
            continue;
        }
        const PolarQuantities q = polar_quantities(s);
        const double v = std::min(q.e1, q.e2);
        ++out.evaluated;
        if (!found || v < out.A) {
            out.A = v;
            out.argmin = p;
            found = true;
        }
    }
    if (!found) throw NoValidSampleError("every region sample has a degenerate polar frame");
    return out;
}

/// Smallest field value over the region: lattice and boundary samples, plus the
/// known minimisers of the analytic kinds when they fall inside the region.
inline double region_min_value(const ScalarField& field, const Region& region, double grid_step) {
    double m = std::numeric_limits<double>::infinity();
    auto consider = [&](Vec2 p) {
        if (region.contains(p, 1e-12) && field.domain().contains(p)) m = std::min(m, field.value(p));
    };
    for (const Vec2& p : region_samples(field, region, grid_step)) consider(p);
    for (const Vec2& p : region.boundary_points()) consider(p);
    const SyntheticSpec& spec = field.synthetic_spec();
    // farthest points catch inverted (k < 0 or amplitude < 0) fields
    if (region.shape == RegionShape::disk) {
        const Vec2 d = region.center - spec.center;
        consider(region.center + region.radius * (d.norm() > 0.0 ? d.normalized() : Vec2(1, 0)));
    } else {
        for (Vec2 corner : {region.min, region.max, Vec2(region.min.x(), region.max.y()),
                            Vec2(region.max.x(), region.min.y())}) {
            consider(corner);
        }
    }
    switch (field.kind()) {
        case FieldKind::quadratic:
        case FieldKind::gaussian: consider(spec.center); break;
        case FieldKind::annulus: {
            const Vec2 probe =
                region.shape == RegionShape::disk ? region.center : Vec2(0.5 * (region.min + region.max));
            const Vec2 d = probe - spec.center;
            if (d.norm() > 0.0) consider(spec.center + spec.radius * d.normalized());
            break;
        }
        case FieldKind::grid: break;
    }
    return m;
}

}  // namespace snake
