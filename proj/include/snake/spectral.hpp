#pragma once

// Equilibrium and attractor analysis of the snake as a dynamical system, and
// the Hamiltonian capture-region certificate.
//
// Near an equilibrium the linearised motion decouples into generalized modes
// D^2 E_p phi = beta M0 phi, each with rates sigma solving
// mu sigma^2 + gamma sigma + beta = 0.

#include <algorithm>
#include <complex>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "snake/contour.hpp"
#include "snake/convexity.hpp"
#include "snake/dynamics.hpp"
#include "snake/hamiltonian.hpp"

namespace snake {

using Complex = std::complex<double>;

/// |grad E_p|_inf; zero exactly at singular points of the flow.
inline double equilibrium_residual(const Contour& contour, const ScalarField& field, const StiffnessSet& stiffness) {
    return energy_gradient(contour, field, stiffness).lpNorm<Eigen::Infinity>();
}

struct ModalRate {
    double beta = 0.0;
    double delta = 0.0;  ///< gamma^2 - 4 mu beta
    Complex sigma_plus;
    Complex sigma_minus;
};

struct ModalSpectrum {
    Vector betas;  ///< ascending
    Matrix modes;  ///< columns, M0-orthonormal
    std::vector<ModalRate> rates;
};

/// Symmetric-definite generalized eigenproblem H phi = beta M0 phi through the
/// congruence M0 = L L^T, C = L^{-1} H L^{-T}.
inline ModalSpectrum generalized_modes(const Matrix& hessian, const Matrix& M0) {
    if (hessian.rows() != hessian.cols() || M0.rows() != M0.cols() || hessian.rows() != M0.rows()) {
        throw DimensionError("hessian and mass matrix must be square and of equal size");
    }
    Eigen::LLT<Matrix> llt(M0);
    if (llt.info() != Eigen::Success) throw DefinitenessError("mass matrix is not positive definite");
    const Matrix L = llt.matrixL();
    Matrix C = L.triangularView<Eigen::Lower>().solve(hessian);
    C = L.triangularView<Eigen::Lower>().solve(C.transpose()).transpose();
    C = 0.5 * (C + C.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(C);
    if (eig.info() != Eigen::Success) throw Error("symmetric eigensolver failed");
    ModalSpectrum s;
    s.betas = eig.eigenvalues();
    s.modes = L.transpose().triangularView<Eigen::Upper>().solve(eig.eigenvectors());
    return s;
}

/// Roots of mu sigma^2 + gamma sigma + beta = 0, sigma+ with the + sign.
inline std::vector<ModalRate> modal_sigmas(const Vector& betas, double mu, double gamma) {
    if (!(mu > 0.0)) throw InvalidSpecError("mu must be > 0");
    if (!(gamma >= 0.0)) throw InvalidSpecError("gamma must be >= 0");
    std::vector<ModalRate> rates;
    rates.reserve(static_cast<std::size_t>(betas.size()));
    for (Eigen::Index i = 0; i < betas.size(); ++i) {
        ModalRate r;
        r.beta = betas[i];
        r.delta = gamma * gamma - 4.0 * mu * r.beta;
        if (r.delta >= 0.0) {
            // q = -(gamma + sqrt(delta)) / 2 avoids cancellation in the smaller root.
            const double q = -0.5 * (gamma + std::sqrt(r.delta));
            const double big = q / mu;
            const double small = q != 0.0 ? r.beta / q : 0.0;
            r.sigma_plus = Complex(small, 0.0);
            r.sigma_minus = Complex(big, 0.0);
        } else {
            const double re = -gamma / (2.0 * mu);
            const double im = std::sqrt(-r.delta) / (2.0 * mu);
            r.sigma_plus = Complex(re, im);
            r.sigma_minus = Complex(re, -im);
        }
        rates.push_back(r);
    }
    return rates;
}

inline ModalSpectrum modal_spectrum(const Matrix& hessian, const Matrix& M0, double mu, double gamma) {
    ModalSpectrum s = generalized_modes(hessian, M0);
    s.rates = modal_sigmas(s.betas, mu, gamma);
    return s;
}

enum class EquilibriumLabel { stable_node, stable_focus, mixed_stable, saddle_unstable, non_hyperbolic };

inline const char* to_string(EquilibriumLabel l) {
    switch (l) {
        case EquilibriumLabel::stable_node: return "stable-node";
        case EquilibriumLabel::stable_focus: return "stable-focus";
        case EquilibriumLabel::mixed_stable: return "mixed-stable";
        case EquilibriumLabel::saddle_unstable: return "saddle/unstable";
        case EquilibriumLabel::non_hyperbolic: return "non-hyperbolic";
    }
    return "unknown";
}

struct EquilibriumClassification {
    EquilibriumLabel label = EquilibriumLabel::non_hyperbolic;
    double min_beta = 0.0;
    double max_beta = 0.0;
    double spectral_abscissa = 0.0;

    bool is_attractor() const {
        return label == EquilibriumLabel::stable_node || label == EquilibriumLabel::stable_focus ||
               label == EquilibriumLabel::mixed_stable;
    }
};

inline constexpr double kNonHyperbolicTolerance = 1e-9;

/// A rate counts as zero when |Re sigma| < tolerance * (1 + |sigma|).
inline EquilibriumClassification classify_equilibrium(const ModalSpectrum& spectrum,
                                                      double tolerance = kNonHyperbolicTolerance) {
    EquilibriumClassification c;
    if (spectrum.rates.empty()) throw SizeError("spectrum has no modes");
    c.min_beta = std::numeric_limits<double>::infinity();
    c.max_beta = -std::numeric_limits<double>::infinity();
    c.spectral_abscissa = -std::numeric_limits<double>::infinity();
    bool any_positive = false, any_zero = false, all_real = true, all_complex = true;
    for (const ModalRate& r : spectrum.rates) {
        c.min_beta = std::min(c.min_beta, r.beta);
        c.max_beta = std::max(c.max_beta, r.beta);
        for (const Complex& s : {r.sigma_plus, r.sigma_minus}) {
            c.spectral_abscissa = std::max(c.spectral_abscissa, s.real());
            const double tol = tolerance * (1.0 + std::abs(s));
            if (s.real() > tol) any_positive = true;
            else if (std::abs(s.real()) < tol) any_zero = true;
        }
        if (r.delta >= 0.0) all_complex = false;
        else all_real = false;
    }
    if (any_positive) c.label = EquilibriumLabel::saddle_unstable;
    else if (any_zero) c.label = EquilibriumLabel::non_hyperbolic;
    else if (all_real) c.label = EquilibriumLabel::stable_node;
    else if (all_complex) c.label = EquilibriumLabel::stable_focus;
    else c.label = EquilibriumLabel::mixed_stable;
    return c;
}

/// First-order system matrix [0, I; -(1/mu) M0^{-1} H, -(gamma/mu) I].
inline Matrix jacobian_DX(const Matrix& hessian, const Matrix& M0, double mu, double gamma) {
    if (!(mu > 0.0)) throw InvalidSpecError("mu must be > 0");
    const Eigen::Index n = hessian.rows();
    Eigen::FullPivLU<Matrix> lu(M0);
    if (!lu.isInvertible()) throw DefinitenessError("mass matrix is singular");
    Matrix J = Matrix::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n) = Matrix::Identity(n, n);
    J.bottomLeftCorner(n, n) = -lu.solve(hessian) / mu;
    J.bottomRightCorner(n, n) = -(gamma / mu) * Matrix::Identity(n, n);
    return J;
}

inline void write_modes_csv(std::ostream& os, const ModalSpectrum& spectrum) {
    os << "beta,delta,re_sigma_plus,im_sigma_plus,re_sigma_minus,im_sigma_minus\n";
    for (const ModalRate& r : spectrum.rates) {
        os << format_double(r.beta) << ',' << format_double(r.delta) << ','
           << format_double(r.sigma_plus.real()) << ',' << format_double(r.sigma_plus.imag()) << ','
           << format_double(r.sigma_minus.real()) << ',' << format_double(r.sigma_minus.imag()) << '\n';
    }
}

inline void write_classification(std::ostream& os, const EquilibriumClassification& c, std::size_t modes) {
    os << "label=" << to_string(c.label) << '\n'
       << "attractor=" << (c.is_attractor() ? "true" : "false") << '\n'
       << "min_beta=" << format_double(c.min_beta) << '\n'
       << "max_beta=" << format_double(c.max_beta) << '\n'
       << "spectral_abscissa=" << format_double(c.spectral_abscissa) << '\n'
       << "modes=" << modes << '\n';
}

// ---------------------------------------------------------------------------
// Capture region

struct CaptureReport {
    bool holds = false;
    double H0 = 0.0;
    double boundary_min = 0.0;
    double margin = 0.0;
    int exit_point = -1;      ///< free point index attaining boundary_min
    Vec2 exit_at = Vec2::Zero();
    std::string method = "estimate (separable lower bound)";
};

namespace detail {

inline void require_inside(const Contour& c, const Region& region) {
    for (int i = 0; i < c.size(); ++i) {
        if (!region.contains(c.points[i])) {
            throw PreconditionError("contour point " + std::to_string(i) + " " + format_point(c.points[i]) +
                                    " lies outside the region");
        }
    }
}

}  // namespace detail

/// H(Q0, mu M0 V0) against a lower bound of E_p over configurations with one
/// free point on the region boundary and the rest inside: for each free point
/// i and boundary sample b, the exact elastic minimum with q_i = b plus
/// (P(b) + (n - 1) min_R P) / N.
inline CaptureReport capture_certificate(const SnakeModel& model, const SnakeParams& params, const Region& region,
                                         const Vector& q0, const Vector& v0, double grid_step = 0.0) {
    const Contour c0 = model.contour(q0);
    validate_region(region, model.field());
    detail::require_inside(c0, region);
    if (grid_step <= 0.0) grid_step = default_grid_step(model.field());

    CaptureReport rep;
    rep.H0 = hamiltonian(q0, v0, model, params).H;

    const StiffnessSet& s = model.stiffness();
    const int n = s.free_count;
    const double N = s.N;
    const double pmin = region_min_value(model.field(), region, grid_step);
    const std::vector<Vec2> boundary = region.boundary_points();
    const Matrix K2 = 2.0 * s.K;
    const Vector& b = model.boundary();

    rep.boundary_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        std::vector<int> rest;
        for (int j = 0; j < 2 * n; ++j) {
            if (j != i && j != n + i) rest.push_back(j);
        }
        const Eigen::Index m = static_cast<Eigen::Index>(rest.size());
        Matrix Krr(m, m), Krf(m, 2);
        for (Eigen::Index a = 0; a < m; ++a) {
            for (Eigen::Index c = 0; c < m; ++c) Krr(a, c) = K2(rest[a], rest[c]);
            Krf(a, 0) = K2(rest[a], i);
            Krf(a, 1) = K2(rest[a], n + i);
        }
        Eigen::LDLT<Matrix> ldlt;
        if (m > 0) ldlt.compute(Krr);
        for (const Vec2& p : boundary) {
            double pb;
            try {
                pb = model.field().value(p);
            } catch (const DomainError&) {
                continue;
            }
            Vector q = Vector::Zero(2 * n);
            q[i] = p.x();
            q[n + i] = p.y();
            if (m > 0 && !s.K.isZero(0.0)) {
                Vector rhs(m);
                for (Eigen::Index a = 0; a < m; ++a) rhs[a] = b[rest[a]];
                rhs -= Krf * p;
                const Vector qr = ldlt.solve(rhs);
                for (Eigen::Index a = 0; a < m; ++a) q[rest[a]] = qr[a];
            }
            const double ee = model.elastic_energy(q);
            const double value = ee + (pb + (n - 1) * pmin) / N;
            if (value < rep.boundary_min) {
                rep.boundary_min = value;
                rep.exit_point = i;
                rep.exit_at = p;
            }
        }
    }
    if (!std::isfinite(rep.boundary_min)) throw NoValidSampleError("no boundary sample inside the field domain");
    rep.margin = rep.boundary_min - rep.H0;
    rep.holds = rep.H0 <= rep.boundary_min;
    return rep;
}

inline void write_capture_report(std::ostream& os, const CaptureReport& r) {
    os << "holds=" << (r.holds ? "true" : "false") << '\n'
       << "H0=" << format_double(r.H0) << '\n'
       << "boundary_min=" << format_double(r.boundary_min) << '\n'
       << "margin=" << format_double(r.margin) << '\n'
       << "boundary_method=" << r.method << '\n'
       << "exit_point=" << r.exit_point << '\n'
       << "exit_at_x=" << format_double(r.exit_at.x()) << '\n'
       << "exit_at_y=" << format_double(r.exit_at.y()) << '\n';
}

struct CaptureVerification {
    bool never_exited = true;
    long exit_iteration = -1;  ///< first iterate outside the region, -1 if none
    std::string stop_reason;
    std::string error;         ///< evolution error message, counted as an exit
    Trace trace;
    Vector final_q;
};

/// Evolves from (Q0, V0) and records whether every iterate stays in the region.
inline CaptureVerification verify_capture(const SnakeModel& model, const SystemMatrices& system,
                                          const SnakeParams& params, const Region& region, const Vector& q0,
                                          const Vector& v0, const StopSpec& stop, long max_iter) {
    detail::require_inside(model.contour(q0), region);
    CaptureVerification out;
    auto inside = [&](const StepperState& st) {
        const Contour c = model.contour(st.q_curr);
        for (const Vec2& p : c.points) {
            if (!region.contains(p)) {
                out.never_exited = false;
                out.exit_iteration = st.iteration;
                return false;
            }
        }
        return true;
    };
    try {
        EvolveResult r = evolve(model, system, params, q0, v0, stop, max_iter, inside);
        out.stop_reason = r.stop_reason;
        out.trace = std::move(r.trace);
        out.final_q = r.state.q_curr;
    } catch (const EvolutionError& e) {
        out.never_exited = false;
        out.exit_iteration = e.iteration();
        out.stop_reason = "error";
        out.error = e.what();
        out.trace = e.partial_trace();
    }
    return out;
}

}  // namespace snake
