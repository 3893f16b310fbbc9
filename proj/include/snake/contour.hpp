#pragma once

// Discrete contour state, stiffness/mass matrices, and the potential energy
// E_p = E_e + E_c with its exact gradient and Hessian.
//
// Free coordinates are stacked blockwise: (x_1 .. x_n, y_1 .. y_n), so that
// A1 = diag(B1, B1) acts on the x and y blocks separately.

#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "snake/error.hpp"
#include "snake/potential.hpp"

namespace snake {

enum class Topology { open, closed };

inline const char* to_string(Topology t) { return t == Topology::open ? "open" : "closed"; }

/// Ordered control points. Open contours keep their first and last point fixed.
struct Contour {
    std::vector<Vec2> points;
    Topology topology = Topology::open;

    Contour() = default;
    Contour(std::vector<Vec2> pts, Topology topo) : points(std::move(pts)), topology(topo) {}

    int size() const { return static_cast<int>(points.size()); }
    /// Segment count N.
    int segments() const { return topology == Topology::open ? size() - 1 : size(); }
    int free_count() const { return topology == Topology::open ? size() - 2 : size(); }
    int first_free() const { return topology == Topology::open ? 1 : 0; }
    bool is_fixed(int i) const { return topology == Topology::open && (i == 0 || i == size() - 1); }

    void validate() const {
        const int min_points = topology == Topology::open ? 3 : 4;
        if (size() < min_points) {
            throw SizeError(std::string(to_string(topology)) + " contour needs at least " +
                            std::to_string(min_points) + " points, got " + std::to_string(size()));
        }
        for (int i = 0; i < size(); ++i) {
            if (!points[i].allFinite()) {
                throw InvalidSpecError("contour point " + std::to_string(i) + " is not finite");
            }
        }
    }

    Vector free_coordinates() const {
        const int n = free_count(), f = first_free();
        Vector q(2 * n);
        for (int i = 0; i < n; ++i) {
            q[i] = points[f + i].x();
            q[n + i] = points[f + i].y();
        }
        return q;
    }

    Contour with_free(const Vector& q) const {
        const int n = free_count(), f = first_free();
        if (q.size() != 2 * n) throw DimensionError("free coordinate vector has wrong length");
        Contour c = *this;
        for (int i = 0; i < n; ++i) c.points[f + i] = Vec2(q[i], q[n + i]);
        return c;
    }

    /// Polyline length, including the closing segment for closed contours.
    double length() const {
        double len = 0.0;
        for (int i = 0; i + 1 < size(); ++i) len += (points[i + 1] - points[i]).norm();
        if (topology == Topology::closed) len += (points.front() - points.back()).norm();
        return len;
    }
};

inline Contour make_circle(Vec2 center, double radius, int count) {
    std::vector<Vec2> pts;
    for (int i = 0; i < count; ++i) {
        const double a = 2.0 * std::numbers::pi * i / count;
        pts.emplace_back(center + radius * Vec2(std::cos(a), std::sin(a)));
    }
    return Contour(std::move(pts), Topology::closed);
}

/// Open straight contour with `count` equally spaced points from start to end.
inline Contour make_line(Vec2 start, Vec2 end, int count) {
    std::vector<Vec2> pts;
    for (int i = 0; i < count; ++i) {
        const double s = static_cast<double>(i) / (count - 1);
        pts.emplace_back(start + s * (end - start));
    }
    return Contour(std::move(pts), Topology::open);
}

struct SnakeParams {
    double omega1 = 0.0;  ///< elasticity
    double omega2 = 0.0;  ///< rigidity
    double mu = 1.0;      ///< mass density
    double gamma = 0.0;   ///< damping density
    double tau = 0.1;     ///< time step

    void validate() const {
        if (!(omega1 >= 0.0) || !std::isfinite(omega1)) throw InvalidSpecError("omega1 must be >= 0");
        if (!(omega2 >= 0.0) || !std::isfinite(omega2)) throw InvalidSpecError("omega2 must be >= 0");
        if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidSpecError("mu must be > 0");
        if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidSpecError("gamma must be >= 0");
        if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidSpecError("tau must be > 0");
    }
};

struct StiffnessSet {
    Topology topology = Topology::open;
    int n_points = 0;
    int N = 0;          ///< segment count
    int free_count = 0;
    double omega1 = 0.0;
    double omega2 = 0.0;
    Matrix B1, B2;      ///< per coordinate, free_count square
    Matrix A1, A2;      ///< diag(B, B)
    Matrix M0;          ///< mass matrix on stacked free coordinates
    Matrix K;           ///< omega1 N A1 + omega2 N^3 A2

    int dim() const { return 2 * free_count; }
};

/// Builds B1, B2 = B1^2, A1, A2, M0 and K. M0 defaults to (1/N) I (point-mass
/// basis); any symmetric positive-definite replacement may be supplied.
inline StiffnessSet build_matrices(int n_points, Topology topology, const SnakeParams& params,
                                   std::optional<Matrix> mass = std::nullopt) {
    const int min_points = topology == Topology::open ? 3 : 4;
    if (n_points < min_points) {
        throw SizeError(std::string(to_string(topology)) + " contour needs at least " +
                        std::to_string(min_points) + " points");
    }
    if (!(params.omega1 >= 0.0) || !(params.omega2 >= 0.0)) {
        throw InvalidSpecError("omega weights must be non-negative");
    }
    StiffnessSet s;
    s.topology = topology;
    s.n_points = n_points;
    s.N = topology == Topology::open ? n_points - 1 : n_points;
    s.free_count = topology == Topology::open ? n_points - 2 : n_points;
    s.omega1 = params.omega1;
    s.omega2 = params.omega2;

    const int n = s.free_count;
    s.B1 = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        s.B1(i, i) = 2.0;
        if (topology == Topology::open) {
            if (i + 1 < n) s.B1(i, i + 1) = s.B1(i + 1, i) = -1.0;
        } else {
            s.B1(i, (i + 1) % n) = -1.0;
            s.B1((i + 1) % n, i) = -1.0;
        }
    }
    s.B2 = s.B1 * s.B1;  // integer entries, exact

    auto blockdiag = [n](const Matrix& B) {
        Matrix A = Matrix::Zero(2 * n, 2 * n);
        A.topLeftCorner(n, n) = B;
        A.bottomRightCorner(n, n) = B;
        return A;
    };
    s.A1 = blockdiag(s.B1);
    s.A2 = blockdiag(s.B2);
    const double N = s.N;
    s.K = params.omega1 * N * s.A1 + params.omega2 * N * N * N * s.A2;

    if (mass) {
        if (mass->rows() != 2 * n || mass->cols() != 2 * n) {
            throw DimensionError("mass matrix must be " + std::to_string(2 * n) + " square");
        }
        if (!mass->isApprox(mass->transpose(), 1e-14)) throw DefinitenessError("mass matrix is not symmetric");
        if (Eigen::LLT<Matrix>(*mass).info() != Eigen::Success) {
            throw DefinitenessError("mass matrix is not positive definite");
        }
        s.M0 = *mass;
    } else {
        s.M0 = Matrix::Identity(2 * n, 2 * n) / N;
    }
    return s;
}

namespace detail {

inline void check_dims(const Contour& c, const StiffnessSet& s) {
    if (c.topology != s.topology || c.size() != s.n_points) {
        throw DimensionError("contour (" + std::to_string(c.size()) + " points, " +
                             to_string(c.topology) + ") does not match stiffness set (" +
                             std::to_string(s.n_points) + " points, " + to_string(s.topology) + ")");
    }
}

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

// Edges (i, i+1) and second-difference centres of the finite-difference sums.
inline int edge_count(const Contour& c) { return c.topology == Topology::open ? c.size() - 1 : c.size(); }
inline int first_bend(const Contour& c) { return c.topology == Topology::open ? 1 : 0; }
inline int last_bend(const Contour& c) { return c.topology == Topology::open ? c.size() - 2 : c.size() - 1; }

/// Gradient of the raw elastic sums with respect to every point (fixed ones included).
inline std::vector<Vec2> elastic_point_gradient(const Contour& c, const StiffnessSet& s) {
    const int m = c.size();
    const double N = s.N;
    const double w1 = s.omega1 * N, w2 = s.omega2 * N * N * N;
    std::vector<Vec2> g(m, Vec2::Zero());
    for (int e = 0; e < edge_count(c); ++e) {
        const int a = e, b = wrap(e + 1, m);
        const Vec2 d = c.points[b] - c.points[a];
        g[b] += 2 * w1 * d;
        g[a] -= 2 * w1 * d;
    }
    for (int i = first_bend(c); i <= last_bend(c); ++i) {
        const int a = wrap(i - 1, m), b = wrap(i + 1, m);
        const Vec2 sd = c.points[b] - 2 * c.points[i] + c.points[a];
        g[a] += 2 * w2 * sd;
        g[b] += 2 * w2 * sd;
        g[i] -= 4 * w2 * sd;
    }
    return g;
}

inline Vector stack_free(const Contour& c, const std::vector<Vec2>& per_point) {
    const int n = c.free_count(), f = c.first_free();
    Vector v(2 * n);
    for (int i = 0; i < n; ++i) {
        v[i] = per_point[f + i].x();
        v[n + i] = per_point[f + i].y();
    }
    return v;
}

inline FieldSample sample_at(const ScalarField& field, const Contour& c, int i) {
    try {
        return field.sample(c.points[i]);
    } catch (const DomainError& e) {
        throw DomainError("contour point " + std::to_string(i) + " " + format_point(c.points[i]) +
                              " outside field derivative domain",
                          c.points[i], i);
    }
}

inline double value_at(const ScalarField& field, const Contour& c, int i) {
    try {
        return field.value(c.points[i]);
    } catch (const DomainError& e) {
        throw DomainError("contour point " + std::to_string(i) + " " + format_point(c.points[i]) +
                              " outside field domain",
                          c.points[i], i);
    }
}

}  // namespace detail

/// omega1 N sum |q_{i+1} - q_i|^2 + omega2 N^3 sum |q_{i+1} - 2 q_i + q_{i-1}|^2.
inline double elastic_energy(const Contour& c, const StiffnessSet& s) {
    detail::check_dims(c, s);
    const int m = c.size();
    const double N = s.N;
    double first = 0.0, second = 0.0;
    for (int e = 0; e < detail::edge_count(c); ++e) {
        first += (c.points[detail::wrap(e + 1, m)] - c.points[e]).squaredNorm();
    }
    for (int i = detail::first_bend(c); i <= detail::last_bend(c); ++i) {
        second += (c.points[detail::wrap(i + 1, m)] - 2 * c.points[i] + c.points[detail::wrap(i - 1, m)])
                      .squaredNorm();
    }
    return s.omega1 * N * first + s.omega2 * N * N * N * second;
}

/// (1/N) sum of P over the free points.
inline double field_energy(const Contour& c, const ScalarField& field) {
    double sum = 0.0;
    for (int i = c.first_free(); i < c.first_free() + c.free_count(); ++i) {
        sum += detail::value_at(field, c, i);
    }
    return sum / c.segments();
}

inline double total_energy(const Contour& c, const ScalarField& field, const StiffnessSet& s) {
    return elastic_energy(c, s) + field_energy(c, field);
}

/// Boundary vector b with grad E_e = 2 K d - b; zero for closed contours.
inline Vector boundary_vector(const Contour& c, const StiffnessSet& s) {
    detail::check_dims(c, s);
    Contour ends = c.with_free(Vector::Zero(2 * c.free_count()));
    return -detail::stack_free(ends, detail::elastic_point_gradient(ends, s));
}

inline Vector elastic_gradient(const Contour& c, const StiffnessSet& s) {
    detail::check_dims(c, s);
    return detail::stack_free(c, detail::elastic_point_gradient(c, s));
}

/// (1/N) grad P at every free point, stacked.
inline Vector field_gradient(const Contour& c, const ScalarField& field) {
    const int n = c.free_count(), f = c.first_free();
    Vector g(2 * n);
    for (int i = 0; i < n; ++i) {
        const Vec2 gp = detail::sample_at(field, c, f + i).grad / c.segments();
        g[i] = gp.x();
        g[n + i] = gp.y();
    }
    return g;
}

inline Vector energy_gradient(const Contour& c, const ScalarField& field, const StiffnessSet& s) {
    return elastic_gradient(c, s) + field_gradient(c, field);
}

/// F = -grad_d E_c.
inline Vector external_force(const Contour& c, const ScalarField& field) {
    return -field_gradient(c, field);
}

/// Block-diagonal field part: (1/N) D^2 P(q_i) on each free point.
inline Matrix field_hessian(const Contour& c, const ScalarField& field) {
    const int n = c.free_count(), f = c.first_free();
    Matrix H = Matrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        const Mat2 D = detail::sample_at(field, c, f + i).hessian / c.segments();
        H(i, i) = D(0, 0);
        H(i, n + i) = D(0, 1);
        H(n + i, i) = D(1, 0);
        H(n + i, n + i) = D(1, 1);
    }
    return H;
}

/// D^2 E_p = 2 omega1 N A1 + 2 omega2 N^3 A2 + blockdiag(D_i).
inline Matrix hessian_Ep(const Contour& c, const ScalarField& field, const StiffnessSet& s) {
    detail::check_dims(c, s);
    return 2.0 * s.K + field_hessian(c, field);
}

// ---------------------------------------------------------------------------
// Free-coordinate view used by the dynamics and the spectral analysis.

class SnakeModel {
public:
    SnakeModel(const ScalarField& field, StiffnessSet stiffness, Contour reference)
        : field_(&field), stiffness_(std::move(stiffness)), reference_(std::move(reference)) {
        reference_.validate();
        detail::check_dims(reference_, stiffness_);
        boundary_ = boundary_vector(reference_, stiffness_);
    }

    const ScalarField& field() const { return *field_; }
    const StiffnessSet& stiffness() const { return stiffness_; }
    const Contour& reference() const { return reference_; }
    const Vector& boundary() const { return boundary_; }
    int dim() const { return stiffness_.dim(); }

    Contour contour(const Vector& q) const { return reference_.with_free(q); }
    double elastic_energy(const Vector& q) const { return snake::elastic_energy(contour(q), stiffness_); }
    double field_energy(const Vector& q) const { return snake::field_energy(contour(q), *field_); }
    double total_energy(const Vector& q) const { return elastic_energy(q) + field_energy(q); }
    Vector gradient(const Vector& q) const { return 2.0 * stiffness_.K * q - boundary_ + field_gradient(q); }
    Vector field_gradient(const Vector& q) const { return snake::field_gradient(contour(q), *field_); }
    Matrix hessian(const Vector& q) const { return hessian_Ep(contour(q), *field_, stiffness_); }

private:
    const ScalarField* field_;
    StiffnessSet stiffness_;
    Contour reference_;
    Vector boundary_;
};

// ---------------------------------------------------------------------------
// CSV: index,x,y,fixed

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_contour_csv(std::ostream& os, const Contour& c) {
    os << "index,x,y,fixed\n";
    for (int i = 0; i < c.size(); ++i) {
        os << i << ',' << format_double(c.points[i].x()) << ',' << format_double(c.points[i].y())
           << ',' << (c.is_fixed(i) ? 1 : 0) << '\n';
    }
}

/// Topology comes from the fixed column: all zero is closed, fixed ends only is open.
inline Contour read_contour_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("contour csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "index,x,y,fixed") throw ConfigError("contour csv: bad header '" + line + "'");
    std::vector<Vec2> pts;
    std::vector<int> fixed;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string idx, xs, ys, fs;
        if (!std::getline(ss, idx, ',') || !std::getline(ss, xs, ',') || !std::getline(ss, ys, ',') ||
            !std::getline(ss, fs)) {
            throw ConfigError("contour csv line " + std::to_string(lineno) + ": expected 4 columns");
        }
        char* end = nullptr;
        const double x = std::strtod(xs.c_str(), &end);
        if (end == xs.c_str() || *end != '\0') throw ConfigError("contour csv line " + std::to_string(lineno) + ": bad x");
        const double y = std::strtod(ys.c_str(), &end);
        if (end == ys.c_str() || *end != '\0') throw ConfigError("contour csv line " + std::to_string(lineno) + ": bad y");
        if (idx != std::to_string(pts.size())) {
            throw ConfigError("contour csv line " + std::to_string(lineno) + ": index out of sequence");
        }
        if (fs != "0" && fs != "1") throw ConfigError("contour csv line " + std::to_string(lineno) + ": fixed must be 0 or 1");
        pts.emplace_back(x, y);
        fixed.push_back(fs == "1" ? 1 : 0);
    }
    if (pts.empty()) throw ConfigError("contour csv: no points");
    const int m = static_cast<int>(pts.size());
    bool none = true, ends_only = m >= 2 && fixed.front() == 1 && fixed.back() == 1;
    for (int i = 0; i < m; ++i) {
        if (fixed[i]) none = false;
        if (i != 0 && i != m - 1 && fixed[i]) ends_only = false;
    }
    if (!none && !ends_only) {
        throw ConfigError("contour csv: fixed flags must be all 0 (closed) or only the two ends (open)");
    }
    Contour c(std::move(pts), none ? Topology::closed : Topology::open);
    c.validate();
    return c;
}

}  // namespace snake
