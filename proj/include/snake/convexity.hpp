#pragma once

// Convexity certificate for the discrete potential energy: Toeplitz bounds on
// the elastic Hessian, eigenvalues of the per-point field blocks, and the
// N-free condition A(R') + omega1 pi^2 + omega2 pi^4 > 0.

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>

#include "snake/contour.hpp"
#include "snake/potential.hpp"

namespace snake {

inline constexpr double kPi = std::numbers::pi;

/// Smallest eigenvalue of the (N-1) x (N-1) tridiagonal Toeplitz B1.
inline double lambda_min_B1(int N) {
    if (N < 2) throw SizeError("lambda_min_B1 needs N >= 2");
    return 2.0 * (1.0 - std::cos(kPi / N));
}

/// Largest eigenvalue of the same matrix.
inline double lambda_max_B1(int N) {
    if (N < 2) throw SizeError("lambda_max_B1 needs N >= 2");
    return 2.0 * (1.0 + std::cos(kPi / N));
}

/// Lower bound on lambda_min of the elastic Hessian 2K.
inline double elastic_hessian_bound(int N, double omega1, double omega2) {
    if (N < 2) throw SizeError("elastic_hessian_bound needs N >= 2");
    if (!(omega1 >= 0.0) || !(omega2 >= 0.0)) throw InvalidSpecError("omega weights must be >= 0");
    const double c = 1.0 - std::cos(kPi / N);
    const double n = N;
    return 4.0 * omega1 * n * c + 8.0 * omega2 * n * n * n * c * c;
}

/// Eigenvalues (descending) of (1/N) [Pxx Pxy; Pxy Pyy].
inline std::pair<double, double> field_block_eigenvalues(double pxx, double pyy, double pxy, int N) {
    if (N < 1) throw SizeError("field_block_eigenvalues needs N >= 1");
    const double mean = (pxx + pyy) / (2.0 * N);
    const double rad = std::sqrt((pxx - pyy) * (pxx - pyy) + 4.0 * pxy * pxy) / (2.0 * N);
    return {mean + rad, mean - rad};
}

struct ConvexityReport {
    double A = 0.0;
    Vec2 argmin = Vec2::Zero();
    double omega1 = 0.0;
    double omega2 = 0.0;
    double elastic_bound = 0.0;    ///< elastic_hessian_bound(N_used, omega1, omega2)
    double condition_value = 0.0;  ///< A + omega1 pi^2 + omega2 pi^4
    bool holds = false;
    long skipped_samples = 0;
    int N_used = 0;
    /// Finite-N cross-check: min sampled field-block eigenvalue + elastic bound.
    double finite_n_value = 0.0;
    bool finite_n_holds = false;
};

inline ConvexityReport certify(const ScalarField& field, const Region& region, double omega1,
                               double omega2, double grid_step, int N = 64) {
    if (!(omega1 >= 0.0) || !(omega2 >= 0.0)) throw InvalidSpecError("omega weights must be >= 0");
    const RegionMinimum rm = region_min_A(field, region, grid_step);
    ConvexityReport r;
    r.A = rm.A;
    r.argmin = rm.argmin;
    r.omega1 = omega1;
    r.omega2 = omega2;
    r.skipped_samples = rm.skipped;
    r.condition_value = rm.A + omega1 * kPi * kPi + omega2 * kPi * kPi * kPi * kPi;
    r.holds = r.condition_value > 0.0;

    r.N_used = N;
    r.elastic_bound = elastic_hessian_bound(N, omega1, omega2);
    const Domain dd = field.derivative_domain();
    double lam = std::numeric_limits<double>::infinity();
    for (const Vec2& p : region_samples(field, region, grid_step)) {
        if (!dd.contains(p)) continue;
        const FieldSample s = field.sample(p);
        lam = std::min(lam, field_block_eigenvalues(s.hessian(0, 0), s.hessian(1, 1), s.hessian(1, 0), N).second);
    }
    r.finite_n_value = lam + r.elastic_bound;
    r.finite_n_holds = r.finite_n_value > 0.0;
    return r;
}

/// Smallest elasticity-only weights giving condition_value = margin.
inline std::pair<double, double> suggest_weights(double A, double margin) {
    if (!(margin > 0.0)) throw InvalidSpecError("margin must be positive");
    if (A >= margin) return {0.0, 0.0};
    return {(-A + margin) / (kPi * kPi), 0.0};
}

inline void write_report_text(std::ostream& os, const ConvexityReport& r) {
    os << "A=" << format_double(r.A) << '\n'
       << "argmin_x=" << format_double(r.argmin.x()) << '\n'
       << "argmin_y=" << format_double(r.argmin.y()) << '\n'
       << "omega1=" << format_double(r.omega1) << '\n'
       << "omega2=" << format_double(r.omega2) << '\n'
       << "elastic_bound=" << format_double(r.elastic_bound) << '\n'
       << "condition_value=" << format_double(r.condition_value) << '\n'
       << "holds=" << (r.holds ? "true" : "false") << '\n'
       << "skipped_samples=" << r.skipped_samples << '\n'
       << "N_used=" << r.N_used << '\n'
       << "finite_n_value=" << format_double(r.finite_n_value) << '\n'
       << "finite_n_positive=" << (r.finite_n_holds ? "true" : "false") << '\n';
}

inline void write_report_csv(std::ostream& os, const ConvexityReport& r, bool header = true) {
    if (header) os << "A,argmin_x,argmin_y,omega1,omega2,condition_value,holds,skipped\n";
    os << format_double(r.A) << ',' << format_double(r.argmin.x()) << ','
       << format_double(r.argmin.y()) << ',' << format_double(r.omega1) << ','
       << format_double(r.omega2) << ',' << format_double(r.condition_value) << ','
       << (r.holds ? 1 : 0) << ',' << r.skipped_samples << '\n';
}

}  // namespace snake
