#pragma once

#include "dicke.hpp"
#include "errors.hpp"
#include "integrator.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <vector>

namespace rydsqz
{

// Continuous phase of a sampled complex signal.
inline std::vector<double> unwrap_phases(const std::vector<cplx>& samples)
{
    std::vector<double> out;
    out.reserve(samples.size());
    double offset = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        const double p = std::arg(samples[i]);
        if (i > 0)
        {
            double d = p - prev;
            if (d > kPi)
                offset -= 2.0 * kPi;
            else if (d < -kPi)
                offset += 2.0 * kPi;
        }
        prev = p;
        out.push_back(p + offset);
    }
    return out;
}

// Least-squares polynomial coefficients c[0] + c[1] x + ... + c[degree] x^degree.
inline Eigen::VectorXd polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree)
{
    if (x.size() != y.size() || x.size() < static_cast<std::size_t>(degree + 1))
        throw InvalidArgument("polyfit: not enough points");
    const auto n = static_cast<Eigen::Index>(x.size());
    // Center and scale x for conditioning, then map back.
    double lo = x.front(), hi = x.front();
    for (double v : x)
    {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double center = 0.5 * (lo + hi);
    const double scale = hi > lo ? 0.5 * (hi - lo) : 1.0;
    Eigen::MatrixXd a(n, degree + 1);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const double u = (x[i] - center) / scale;
        double p = 1.0;
        for (int k = 0; k <= degree; ++k)
        {
            a(i, k) = p;
            p *= u;
        }
        b[i] = y[i];
    }
    const Eigen::VectorXd cu = a.colPivHouseholderQr().solve(b);

    // Expand sum_k cu_k ((x - center)/scale)^k in powers of x.
    Eigen::VectorXd c = Eigen::VectorXd::Zero(degree + 1);
    for (int k = 0; k <= degree; ++k)
    {
        double binom = 1.0;
        for (int j = 0; j <= k; ++j)
        {
            // coefficient of x^j in (x - center)^k is C(k, j) (-center)^(k-j)
            c[j] += cu[k] * binom * std::pow(-center, k - j) / std::pow(scale, k);
            binom = binom * (k - j) / (j + 1);
        }
    }
    return c;
}

struct LinearFit
{
    double slope = 0.0;
    double intercept = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y)
{
    const auto c = polyfit(x, y, 1);
    return {c[1], c[0]};
}

struct SampledEvolution
{
    std::vector<double> times;
    std::vector<DenseOp> states; // one matrix of column states per time
    double dt = 0.0;
    bool used_period_map = false;
};

// Evolves several column states together and samples them on a uniform grid.
// When the Hamiltonian is periodic the sample spacing is rounded to whole
// periods and the RK4 step map of one period is reused.
template <class ApplyH>
SampledEvolution sample_evolution(ApplyH&& apply, const DenseOp& initial, std::optional<double> period,
                                  double max_dt, double spacing, int n_samples)
{
    if (!(max_dt > 0.0) || !(spacing > 0.0) || n_samples < 1)
        throw InvalidArgument("sample_evolution: invalid grid");
    SampledEvolution out;
    out.times.reserve(static_cast<std::size_t>(n_samples) + 1);
    out.states.reserve(static_cast<std::size_t>(n_samples) + 1);
    out.times.push_back(0.0);
    out.states.push_back(initial);
    const auto dim = static_cast<std::size_t>(initial.rows());

    if (period)
    {
        const long per_period = std::max(1L, static_cast<long>(std::ceil(*period / max_dt)));
        const double dt = *period / static_cast<double>(per_period);
        const long q = std::max(1L, std::lround(spacing / *period));
        const DenseOp one = rk4_step_map(apply, dim, 0.0, dt, per_period);
        DenseOp map = one;
        for (long k = 1; k < q; ++k)
            map = one * map;
        out.dt = dt;
        out.used_period_map = true;
        DenseOp state = initial;
        for (int s = 1; s <= n_samples; ++s)
        {
            state = map * state;
            out.times.push_back(static_cast<double>(s) * static_cast<double>(q) * *period);
            out.states.push_back(state);
        }
        return out;
    }

    const long steps = std::max(1L, static_cast<long>(std::ceil(spacing / max_dt)));
    const double dt = spacing / static_cast<double>(steps);
    out.dt = dt;
    DenseOp state = initial;
    Rk4<DenseOp> rk;
    long k = 0;
    for (int s = 1; s <= n_samples; ++s)
    {
        for (long j = 0; j < steps; ++j, ++k)
            rk.step(apply, static_cast<double>(k) * dt, dt, state);
        out.times.push_back(static_cast<double>(s) * spacing);
        out.states.push_back(state);
    }
    return out;
}

// Quasi-energy of a state from the slope of the phase of its survival
// amplitude <psi0|psi(t)>.
inline double phase_slope_energy(const std::vector<double>& times, const std::vector<cplx>& amplitudes)
{
    const auto phases = unwrap_phases(amplitudes);
    return -linear_fit(times, phases).slope;
}

} // namespace rydsqz
