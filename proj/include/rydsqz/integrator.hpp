#pragma once

// Fixed-step RK4 for i d/dt psi = H(t) psi, and an exact propagator for
// small static Hermitian matrices used as a cross-check.

#include "dicke.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace rydsqz
{

// Upper bound on the spectral norm: the maximum absolute row sum.
inline double operator_norm_bound(const SparseOp& op)
{
    double best = 0.0;
    for (Eigen::Index row = 0; row < op.outerSize(); ++row)
    {
        double sum = 0.0;
        for (SparseOp::InnerIterator it(op, row); it; ++it)
            sum += std::abs(it.value());
        best = std::max(best, sum);
    }
    return best;
}

inline double operator_norm_bound(const DenseOp& op)
{
    return op.cwiseAbs().rowwise().sum().maxCoeff();
}

// One classical RK4 step. `apply(t, in, out)` must write out = H(t) * in.
// State may be a vector or a matrix of column vectors.
template <class State>
class Rk4
{
public:
    template <class ApplyH>
    void step(ApplyH&& apply, double t, double dt, State& psi)
    {
        const cplx minus_i(0.0, -1.0);
        apply(t, psi, m_k1);
        m_k1 *= minus_i;
        m_tmp = psi + (0.5 * dt) * m_k1;
        apply(t + 0.5 * dt, m_tmp, m_k2);
        m_k2 *= minus_i;
        m_tmp = psi + (0.5 * dt) * m_k2;
        apply(t + 0.5 * dt, m_tmp, m_k3);
        m_k3 *= minus_i;
        m_tmp = psi + dt * m_k3;
        apply(t + dt, m_tmp, m_k4);
        m_k4 *= minus_i;
        psi += (dt / 6.0) * (m_k1 + 2.0 * m_k2 + 2.0 * m_k3 + m_k4);
    }

private:
    State m_k1, m_k2, m_k3, m_k4, m_tmp;
};

// Product of `n_steps` RK4 step maps starting at t0. Because RK4 is linear
// in the state, applying this matrix equals stepping column by column.
template <class ApplyH>
DenseOp rk4_step_map(ApplyH&& apply, std::size_t dim, double t0, double dt, long n_steps)
{
    DenseOp map = DenseOp::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    Rk4<DenseOp> rk;
    for (long k = 0; k < n_steps; ++k)
        rk.step(apply, t0 + static_cast<double>(k) * dt, dt, map);
    return map;
}

// exp(-i H t) through the eigendecomposition of a static Hermitian matrix.
class ExactPropagator
{
public:
    static constexpr Eigen::Index kMaxDimension = 800;

    explicit ExactPropagator(const DenseOp& hamiltonian)
    {
        if (hamiltonian.rows() != hamiltonian.cols())
            throw InvalidArgument("ExactPropagator: matrix must be square");
        if (hamiltonian.rows() > kMaxDimension)
            throw InvalidArgument("ExactPropagator: dimension too large for dense diagonalization");
        Eigen::SelfAdjointEigenSolver<DenseOp> solver(hamiltonian);
        if (solver.info() != Eigen::Success)
            throw IntegrationFailure("ExactPropagator: eigendecomposition failed");
        m_energies = solver.eigenvalues();
        m_vectors = solver.eigenvectors();
    }

    explicit ExactPropagator(const SparseOp& hamiltonian) : ExactPropagator(DenseOp(hamiltonian)) {}

    Amplitudes apply(const Amplitudes& psi, double t) const
    {
        Amplitudes coeffs = m_vectors.adjoint() * psi;
        for (Eigen::Index k = 0; k < coeffs.size(); ++k)
            coeffs[k] *= std::polar(1.0, -m_energies[k] * t);
        return m_vectors * coeffs;
    }

    DenseOp propagator(double t) const
    {
        Amplitudes phases(m_energies.size());
        for (Eigen::Index k = 0; k < phases.size(); ++k)
            phases[k] = std::polar(1.0, -m_energies[k] * t);
        return m_vectors * phases.asDiagonal() * m_vectors.adjoint();
    }

    const Eigen::VectorXd& energies() const { return m_energies; }
    const DenseOp& eigenvectors() const { return m_vectors; }

private:
    Eigen::VectorXd m_energies;
    DenseOp m_vectors;
};

} // namespace rydsqz
