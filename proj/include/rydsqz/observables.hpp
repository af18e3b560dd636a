#pragma once

#include "dicke.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace rydsqz
{

// Transverse axis used for the squeezing factor S = (N/4) / Var(J_{-pi/4}).
inline constexpr double kSqueezingAxis = -kPi / 4.0;

inline constexpr double kObservableNormTolerance = 1e-6;

struct SpinObservables
{
    int n_atoms = 0;
    std::array<double, 3> mean_spin{}; // <J_x>, <J_y>, <J_z>
    double jx2 = 0.0;                  // <J_x^2>
    double jy2 = 0.0;                  // <J_y^2>
    double jxy = 0.0;                  // <J_x J_y + J_y J_x>
    double rydberg_population = 0.0;
    double n_a_mean = 0.0;
    double n_b_mean = 0.0;

    double mean_at(double theta) const
    {
        return std::cos(theta) * mean_spin[0] - std::sin(theta) * mean_spin[1];
    }

    // Var(J_theta), J_theta = cos(theta) J_x - sin(theta) J_y.
    double variance_at(double theta) const
    {
        const double c = std::cos(theta), s = std::sin(theta);
        const double second = c * c * jx2 + s * s * jy2 - c * s * jxy;
        const double m = mean_at(theta);
        return std::max(0.0, second - m * m);
    }

    double var_x() const { return jx2 - mean_spin[0] * mean_spin[0]; }
    double var_y() const { return jy2 - mean_spin[1] * mean_spin[1]; }
    double cov_xy() const { return jxy - 2.0 * mean_spin[0] * mean_spin[1]; }
};

struct SqueezingMetrics
{
    double s_factor = 1.0;
    double theta_min = 0.0; // in [0, pi)
    double variance_min = 0.0;
    double variance_axis = 0.0; // Var(J_{-pi/4})
    bool infinite = false;
};

// Caches the spin operators of one basis so repeated evaluation along a
// trajectory does not rebuild them.
class SpinMeter
{
public:
    explicit SpinMeter(const DickeBasis& basis)
        : m_basis(basis),
          m_jx(spin_x(basis)),
          m_jy(spin_y(basis)),
          m_jz(spin_z(basis)),
          m_na(number_operator(basis, Level::a)),
          m_nb(number_operator(basis, Level::b)),
          m_nr(number_operator(basis, Level::r))
    {
    }

    const DickeBasis& basis() const { return m_basis; }

    SpinObservables measure(const Amplitudes& psi) const
    {
        if (static_cast<std::size_t>(psi.size()) != m_basis.dimension())
            throw InvalidArgument("observables: state dimension does not match basis");
        if (std::abs(psi.squaredNorm() - 1.0) > kObservableNormTolerance)
            throw InvalidState("observables: state is not normalized");

        SpinObservables o;
        o.n_atoms = m_basis.n_atoms();
        const Amplitudes x = m_jx * psi;
        const Amplitudes y = m_jy * psi;
        o.mean_spin[0] = psi.dot(x).real();
        o.mean_spin[1] = psi.dot(y).real();
        o.mean_spin[2] = expectation(m_jz, psi).real();
        o.jx2 = x.squaredNorm();
        o.jy2 = y.squaredNorm();
        o.jxy = 2.0 * x.dot(y).real();
        o.n_a_mean = expectation(m_na, psi).real();
        o.n_b_mean = expectation(m_nb, psi).real();
        o.rydberg_population = expectation(m_nr, psi).real();
        return o;
    }

    SpinObservables measure(const DickeState& state) const { return measure(state.amplitudes()); }

private:
    DickeBasis m_basis;
    SparseOp m_jx, m_jy, m_jz, m_na, m_nb, m_nr;
};

inline SpinObservables observables(const DickeState& state)
{
    return SpinMeter(state.basis()).measure(state);
}

// Squeezing factor at the fixed axis plus the optimal axis from the closed
// form Var(theta) = M + p cos(2 theta) - q sin(2 theta).
inline SqueezingMetrics squeezing(const SpinObservables& o)
{
    SqueezingMetrics m;
    const double vxx = o.var_x(), vyy = o.var_y(), cxy = o.cov_xy();
    const double mid = 0.5 * (vxx + vyy);
    const double p = 0.5 * (vxx - vyy);
    const double q = 0.5 * cxy;
    const double amplitude = std::hypot(p, q);
    const double phi = std::atan2(q, p);
    double theta = 0.5 * (kPi - phi);
    theta = std::fmod(theta, kPi);
    if (theta < 0.0)
        theta += kPi;
    m.theta_min = theta;
    m.variance_min = std::max(0.0, mid - amplitude);

    m.variance_axis = o.variance_at(kSqueezingAxis);
    const double floor = 1e-14 * std::max(1, o.n_atoms);
    if (m.variance_axis <= floor)
    {
        m.infinite = true;
        m.s_factor = std::numeric_limits<double>::infinity();
    }
    else
    {
        m.s_factor = (o.n_atoms / 4.0) / m.variance_axis;
    }
    return m;
}

inline SqueezingMetrics squeezing(const DickeState& state) { return squeezing(observables(state)); }

} // namespace rydsqz
