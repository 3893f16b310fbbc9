#pragma once

// Semi-implicit evolution of the dynamic snake
//
//   mu M0 Qdd + gamma M0 Qd + grad E_p(Q) = 0
//
// with central differences in time, the elastic force implicit at t + tau and
// the field force lagged at t - tau:
//
//   A Q^{t+tau} = b - grad E_c(Q^{t-tau}) + (2 mu / tau^2) M0 Q^t
//                 - (mu / tau^2 - gamma / (2 tau)) M0 Q^{t-tau}
//   A = beta M0 + D^2 E_e,   beta = mu / tau^2 + gamma / (2 tau),   D^2 E_e = 2K.

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "snake/contour.hpp"
#include "snake/convexity.hpp"
#include "snake/hamiltonian.hpp"

namespace snake {

struct StepperState {
    Vector q_curr;
    Vector q_prev;
    double t = 0.0;
    long iteration = 0;
};

struct SystemMatrices {
    Matrix A;
    double beta = 0.0;
    Eigen::LLT<Matrix> factorization;

    Vector solve(const Vector& rhs) const { return factorization.solve(rhs); }
};

inline double beta_coefficient(const SnakeParams& p) { return p.mu / (p.tau * p.tau) + p.gamma / (2.0 * p.tau); }

inline SystemMatrices assemble_system(const StiffnessSet& stiffness, const SnakeParams& params) {
    params.validate();
    SystemMatrices sys;
    sys.beta = beta_coefficient(params);
    sys.A = sys.beta * stiffness.M0 + 2.0 * stiffness.K;
    sys.factorization.compute(sys.A);
    if (sys.factorization.info() != Eigen::Success) {
        throw AssemblyError("system matrix is not positive definite");
    }
    return sys;
}

struct ConditionDiagnostics {
    double kappa_bound = 1.0;
    double lambda_max_bound = 0.0;
    double lambda_max_K = 0.0;  ///< closed-form lambda_max of the elastic Hessian 2K
};

/// Closed-form largest eigenvalue of B1 for the given topology.
inline double lambda_max_B1(int N, Topology topology) {
    if (topology == Topology::open) return lambda_max_B1(N);
    return 2.0 - 2.0 * std::cos(2.0 * kPi * (N / 2) / N);
}

inline ConditionDiagnostics condition_diagnostics(const SystemMatrices& system, const StiffnessSet& stiffness) {
    ConditionDiagnostics d;
    Eigen::SelfAdjointEigenSolver<Matrix> mass(stiffness.M0, Eigen::EigenvaluesOnly);
    const double mmin = mass.eigenvalues().minCoeff();
    const double mmax = mass.eigenvalues().maxCoeff();
    const double N = stiffness.N;
    const double lb1 = lambda_max_B1(stiffness.N, stiffness.topology);
    d.lambda_max_K = 2.0 * stiffness.omega1 * N * lb1 + 2.0 * stiffness.omega2 * N * N * N * lb1 * lb1;
    d.kappa_bound = 1.0 + (mmax - mmin) / mmin + d.lambda_max_K / (system.beta * mmin);
    d.lambda_max_bound = system.A.cwiseAbs().rowwise().sum().maxCoeff();
    return d;
}

// ---------------------------------------------------------------------------
// Trace

struct TraceRecord {
    long iteration = 0;
    double t = 0.0;
    double E_e = 0.0;
    double E_c = 0.0;
    double E_p = 0.0;
    double T = 0.0;
    double H = 0.0;
    double dissipation = 0.0;
    double steady_delta = 0.0;    ///< |Q^n - Q^{n-1}|
    double E1 = 0.0;              ///< mean field energy
    double delta_E1 = 0.0;        ///< |E1^n - E1^{n-1}|, nan on the initial record
    double max_displacement = 0.0;
};

struct Trace {
    std::vector<TraceRecord> records;

    std::size_t size() const { return records.size(); }
    const TraceRecord& back() const { return records.back(); }
};

inline void write_trace_csv(std::ostream& os, const Trace& trace) {
    os << "iteration,t,E_e,E_c,E_p,T,H,dissipation,steady_delta,E1,delta_E1,max_displacement\n";
    for (const TraceRecord& r : trace.records) {
        os << r.iteration << ',' << format_double(r.t) << ',' << format_double(r.E_e) << ','
           << format_double(r.E_c) << ',' << format_double(r.E_p) << ',' << format_double(r.T) << ','
           << format_double(r.H) << ',' << format_double(r.dissipation) << ','
           << format_double(r.steady_delta) << ',' << format_double(r.E1) << ','
           << format_double(r.delta_E1) << ',' << format_double(r.max_displacement) << '\n';
    }
}

/// Sum of P(q_i) / N over free points divided by the polyline length.
inline double mean_field_energy(const Contour& contour, const ScalarField& field) {
    const double len = contour.length();
    if (!(len > 0.0)) throw DegenerateError("contour has zero length");
    return field_energy(contour, field) / len;
}

inline bool steady_state_met(const Trace& trace, double epsilon) {
    if (trace.size() < 2) return false;
    return trace.back().steady_delta < epsilon;
}

inline bool steady_support_met(const Trace& trace, double epsilon) {
    if (trace.size() < 2) return false;
    return trace.back().delta_E1 < epsilon;
}

enum class StopCriterion { steady_state, steady_support, both, none };

inline const char* to_string(StopCriterion c) {
    switch (c) {
        case StopCriterion::steady_state: return "steady-state";
        case StopCriterion::steady_support: return "steady-support";
        case StopCriterion::both: return "both";
        case StopCriterion::none: return "none";
    }
    return "none";
}

struct StopSpec {
    StopCriterion criterion = StopCriterion::steady_state;
    double epsilon = 1e-8;
};

inline bool criterion_met(const Trace& trace, const StopSpec& stop) {
    switch (stop.criterion) {
        case StopCriterion::steady_state: return steady_state_met(trace, stop.epsilon);
        case StopCriterion::steady_support: return steady_support_met(trace, stop.epsilon);
        case StopCriterion::both:
            return steady_state_met(trace, stop.epsilon) && steady_support_met(trace, stop.epsilon);
        case StopCriterion::none: return false;
    }
    return false;
}

/// Raised when an evolution leaves the field domain or diverges; carries the
/// trace recorded up to the failure.
class EvolutionError : public Error {
public:
    EvolutionError(const std::string& what, long iteration, long point_index, Trace partial)
        : Error(what), iteration_(iteration), point_index_(point_index), partial_(std::move(partial)) {}

    long iteration() const noexcept { return iteration_; }
    long point_index() const noexcept { return point_index_; }
    const Trace& partial_trace() const noexcept { return partial_; }

private:
    long iteration_;
    long point_index_;
    Trace partial_;
};

class DivergenceError : public EvolutionError {
public:
    using EvolutionError::EvolutionError;
};

/// Advances one step. Throws EvolutionError (empty trace) on domain exit or divergence.
inline StepperState step(const StepperState& state, const SystemMatrices& system, const SnakeModel& model,
                         const SnakeParams& params) {
    const Matrix& M0 = model.stiffness().M0;
    const double mt = params.mu / (params.tau * params.tau);
    const double damp = params.gamma / (2.0 * params.tau);

    Vector field_grad;
    try {
        field_grad = model.field_gradient(state.q_prev);
    } catch (const DomainError& e) {
        throw EvolutionError(std::string("iteration ") + std::to_string(state.iteration + 1) + ": " + e.what(),
                             state.iteration + 1, e.index(), {});
    }
    const Vector rhs = model.boundary() - field_grad + 2.0 * mt * (M0 * state.q_curr) -
                       (mt - damp) * (M0 * state.q_prev);

    StepperState next;
    next.q_curr = system.solve(rhs);
    next.q_prev = state.q_curr;
    next.t = state.t + params.tau;
    next.iteration = state.iteration + 1;

    const double limit = 1e6 * model.field().domain().diagonal();
    if (!next.q_curr.allFinite() || next.q_curr.norm() > limit) {
        throw DivergenceError("iteration " + std::to_string(next.iteration) + ": evolution diverged",
                              next.iteration, -1, {});
    }
    const Contour c = model.contour(next.q_curr);
    const Domain dd = model.field().derivative_domain();
    for (int i = 0; i < c.size(); ++i) {
        if (!dd.contains(c.points[i])) {
            throw EvolutionError("iteration " + std::to_string(next.iteration) + ": point " + std::to_string(i) +
                                     " " + format_point(c.points[i]) + " left the field domain",
                                 next.iteration, i, {});
        }
    }
    return next;
}

namespace detail {

inline TraceRecord make_record(const StepperState& s, const SnakeModel& model, const SnakeParams& params,
                               const TraceRecord* previous) {
    TraceRecord r;
    r.iteration = s.iteration;
    r.t = s.t;
    const Contour c = model.contour(s.q_curr);
    r.E_e = elastic_energy(c, model.stiffness());
    r.E_c = field_energy(c, model.field());
    r.E_p = r.E_e + r.E_c;
    const Vector v = (s.q_curr - s.q_prev) / params.tau;
    const Matrix& M0 = model.stiffness().M0;
    r.T = 0.5 * params.mu * v.dot(M0 * v);
    r.H = r.T + r.E_p;
    r.dissipation = dissipation_rate(v, M0, params.gamma);
    const Vector dq = s.q_curr - s.q_prev;
    r.steady_delta = dq.norm();
    const int n = static_cast<int>(dq.size() / 2);
    for (int i = 0; i < n; ++i) {
        r.max_displacement = std::max(r.max_displacement, std::hypot(dq[i], dq[n + i]));
    }
    r.E1 = mean_field_energy(c, model.field());
    r.delta_E1 = previous ? std::abs(r.E1 - previous->E1) : std::numeric_limits<double>::quiet_NaN();
    return r;
}

}  // namespace detail

struct EvolveResult {
    Contour contour;
    Trace trace;
    StepperState state;
    std::string stop_reason;  ///< "criterion", "max_iter" or "observer"
};

/// Called after every step; returning false ends the run with stop_reason "observer".
using StepObserver = std::function<bool(const StepperState&)>;

/// Runs the scheme from (q0, v0), seeding Q_prev = q0 - tau v0.
inline EvolveResult evolve(const SnakeModel& model, const SystemMatrices& system, const SnakeParams& params,
                           const Vector& q0, const Vector& v0, const StopSpec& stop, long max_iter,
                           const StepObserver& observer = {}) {
    if (q0.size() != model.dim() || v0.size() != model.dim()) {
        throw DimensionError("initial state does not match the model dimension");
    }
    EvolveResult out;
    StepperState s;
    s.q_curr = q0;
    s.q_prev = q0 - params.tau * v0;
    out.trace.records.push_back(detail::make_record(s, model, params, nullptr));
    out.stop_reason = "max_iter";
    for (long it = 0; it < max_iter; ++it) {
        try {
            s = step(s, system, model, params);
        } catch (const DivergenceError& e) {
            throw DivergenceError(e.what(), e.iteration(), e.point_index(), out.trace);
        } catch (const EvolutionError& e) {
            throw EvolutionError(e.what(), e.iteration(), e.point_index(), out.trace);
        }
        out.trace.records.push_back(detail::make_record(s, model, params, &out.trace.records.back()));
        if (observer && !observer(s)) {
            out.stop_reason = "observer";
            break;
        }
        if (criterion_met(out.trace, stop)) {
            out.stop_reason = "criterion";
            break;
        }
    }
    out.state = s;
    out.contour = model.contour(s.q_curr);
    return out;
}

/// Convenience overload building matrices from the initial contour.
/// velocity0 is stacked like the free coordinates; empty means zero.
inline EvolveResult evolve(const Contour& contour0, const Vector& velocity0, const ScalarField& field,
                           const SnakeParams& params, const StopSpec& stop, long max_iter) {
    contour0.validate();
    params.validate();
    SnakeModel model(field, build_matrices(contour0.size(), contour0.topology, params), contour0);
    const SystemMatrices system = assemble_system(model.stiffness(), params);
    const Vector v0 = velocity0.size() == 0 ? Vector::Zero(model.dim()) : velocity0;
    return evolve(model, system, params, contour0.free_coordinates(), v0, stop, max_iter);
}

}  // namespace snake
