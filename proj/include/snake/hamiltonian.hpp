#pragma once

// Hamiltonian of the snake: H(Q, P) = P^T M0^{-1} P / (2 mu) + E_p(Q),
// with conjugate momenta P = mu M0 Qdot.

#include <cmath>

#include "snake/contour.hpp"

namespace snake {

struct HamiltonianValue {
    double H = 0.0;
    double T = 0.0;
    double Ep = 0.0;
    Vector P;
    /// T evaluated from the momenta, for the identity check against T.
    double T_from_momenta = 0.0;
};

inline HamiltonianValue hamiltonian(const Vector& q, const Vector& qdot, const SnakeModel& model,
                                    const SnakeParams& params) {
    const Matrix& M0 = model.stiffness().M0;
    if (qdot.size() != M0.rows() || q.size() != M0.rows()) {
        throw DimensionError("state vectors do not match the mass matrix");
    }
    HamiltonianValue h;
    h.P = params.mu * (M0 * qdot);
    h.T = 0.5 * params.mu * qdot.dot(M0 * qdot);
    h.T_from_momenta = h.P.dot(M0.llt().solve(h.P)) / (2.0 * params.mu);
    h.Ep = model.total_energy(q);
    h.H = h.T + h.Ep;
    return h;
}

struct HamiltonianGradient {
    Vector dH_dQ;
    Vector dH_dP;
};

inline HamiltonianGradient grad_H_at(const Vector& q, const Vector& p, const SnakeModel& model,
                                     const SnakeParams& params) {
    HamiltonianGradient g;
    g.dH_dQ = model.gradient(q);
    g.dH_dP = model.stiffness().M0.llt().solve(p) / params.mu;
    return g;
}

/// gamma Qdot^T M0 Qdot, the rate at which viscous damping removes energy.
inline double dissipation_rate(const Vector& qdot, const Matrix& M0, double gamma) {
    if (!(gamma >= 0.0)) throw InvalidSpecError("gamma must be >= 0");
    return gamma * qdot.dot(M0 * qdot);
}

/// D^2 H = blockdiag(D^2 E_p, M0^{-1} / mu).
inline Matrix hamiltonian_hessian(const Matrix& hessian_ep, const Matrix& M0, double mu) {
    const Eigen::Index n = hessian_ep.rows();
    Matrix H = Matrix::Zero(2 * n, 2 * n);
    H.topLeftCorner(n, n) = hessian_ep;
    H.bottomRightCorner(n, n) = M0.llt().solve(Matrix::Identity(n, n)) / mu;
    return H;
}

}  // namespace snake
