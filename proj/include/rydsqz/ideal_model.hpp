#pragma once

// Two-axis countertwisting dynamics H = 2 W (J_x^2 - J_y^2)
//                                     = W (a^dag^2 b^2 + b^dag^2 a^2)
// on the ground manifold, and its short-time analytic solution.

#include "dicke.hpp"
#include "integrator.hpp"
#include "observables.hpp"
#include "trace.hpp"

#include <cmath>
#include <string>

namespace rydsqz
{

inline constexpr double kMaxPhasePerStep = 0.1; // rad
inline constexpr double kHardNormTolerance = 1e-6;

struct IdealConfig
{
    int n_atoms = 20;
    double omega_eff = 1.0;
    double t_final = 1.0;
    int n_steps = 100;           // number of recorded intervals
    int substeps_per_sample = 1; // RK4 steps between recorded samples

    void validate() const
    {
        if (n_atoms < 1)
            throw InvalidArgument("IdealConfig: n_atoms must be >= 1");
        if (!(t_final > 0.0) || !std::isfinite(t_final))
            throw InvalidArgument("IdealConfig: t_final must be > 0");
        if (n_steps < 1)
            throw InvalidArgument("IdealConfig: n_steps must be >= 1");
        if (substeps_per_sample < 1)
            throw InvalidArgument("IdealConfig: substeps_per_sample must be >= 1");
        if (!std::isfinite(omega_eff))
            throw InvalidArgument("IdealConfig: omega_eff must be finite");
    }

    double dt() const { return t_final / (static_cast<double>(n_steps) * substeps_per_sample); }
};

inline SparseOp build_ideal_hamiltonian(const DickeBasis& basis, double omega_eff)
{
    if (basis.max_rydberg() != 0)
        throw InvalidArgument("build_ideal_hamiltonian: basis must have max_rydberg = 0");
    const SparseOp raise = ladder_action(basis, ladder::a_dag_b);
    SparseOp pair = raise * raise; // a^dag^2 b^2
    SparseOp h = pair + SparseOp(pair.adjoint());
    h *= omega_eff;
    h.prune(cplx(0.0));
    return h;
}

// Short-time predictions valid while n_b << N.
struct IdealPrediction
{
    int n_atoms = 0;
    double omega_eff = 0.0;

    double s_analytic(double t) const { return std::exp(4.0 * n_atoms * omega_eff * t); }

    double nb_analytic(double t) const
    {
        const double s = std::sinh(2.0 * n_atoms * omega_eff * t);
        return s * s;
    }

    // Intermediate-time relation S ~ 4 n_b for 1 << n_b << N.
    static double s_from_nb(double nb) { return 4.0 * nb; }
};

inline IdealPrediction analytic_curves(const IdealConfig& config)
{
    config.validate();
    return IdealPrediction{config.n_atoms, config.omega_eff};
}

inline TraceRow make_row(double t, const SpinObservables& o, double norm)
{
    const auto m = squeezing(o);
    TraceRow row;
    row.t = t;
    row.s_factor = m.s_factor;
    row.nb_mean = o.n_b_mean;
    row.nr_mean = o.rydberg_population;
    row.norm = norm;
    row.mean_spin = o.mean_spin;
    row.theta_min = m.theta_min;
    return row;
}

inline SqueezingTrace evolve_ideal(const IdealConfig& config, const DickeState& initial)
{
    config.validate();
    const auto& basis = initial.basis();
    if (basis.n_atoms() != config.n_atoms || basis.max_rydberg() != 0)
        throw InvalidArgument("evolve_ideal: initial state basis does not match config");

    const SparseOp h = build_ideal_hamiltonian(basis, config.omega_eff);
    const double dt = config.dt();
    if (operator_norm_bound(h) * dt > kMaxPhasePerStep)
        throw StepSizeError("evolve_ideal: step too coarse (|H| dt = " +
                            std::to_string(operator_norm_bound(h) * dt) + " > 0.1 rad)");

    SpinMeter meter(basis);
    SqueezingTrace trace;
    trace.n_atoms = config.n_atoms;
    trace.set_meta("model", "ideal");
    trace.set_meta("n_atoms", std::to_string(config.n_atoms));

    Amplitudes psi = initial.amplitudes();
    auto apply = [&h](double, const Amplitudes& in, Amplitudes& out) { out.noalias() = h * in; };
    Rk4<Amplitudes> rk;

    trace.rows.reserve(static_cast<std::size_t>(config.n_steps) + 1);
    trace.rows.push_back(make_row(0.0, meter.measure(psi), psi.norm()));
    double prev_norm2 = psi.squaredNorm();
    long step = 0;
    for (int sample = 1; sample <= config.n_steps; ++sample)
    {
        for (int sub = 0; sub < config.substeps_per_sample; ++sub, ++step)
        {
            rk.step(apply, static_cast<double>(step) * dt, dt, psi);
            const double n2 = psi.squaredNorm();
            trace.max_step_norm_drift = std::max(trace.max_step_norm_drift, std::abs(n2 - prev_norm2));
            prev_norm2 = n2;
        }
        if (std::abs(prev_norm2 - 1.0) > kHardNormTolerance)
            throw IntegrationFailure("evolve_ideal: norm drift exceeds 1e-6");
        const double t = config.t_final * static_cast<double>(sample) / config.n_steps;
        trace.rows.push_back(make_row(t, meter.measure(psi), std::sqrt(prev_norm2)));
    }
    return trace;
}

// Final state of the ideal evolution, for callers that need amplitudes.
inline Amplitudes propagate_ideal(const IdealConfig& config, const DickeState& initial)
{
    config.validate();
    const SparseOp h = build_ideal_hamiltonian(initial.basis(), config.omega_eff);
    const double dt = config.dt();
    if (operator_norm_bound(h) * dt > kMaxPhasePerStep)
        throw StepSizeError("propagate_ideal: step too coarse");
    Amplitudes psi = initial.amplitudes();
    auto apply = [&h](double, const Amplitudes& in, Amplitudes& out) { out.noalias() = h * in; };
    Rk4<Amplitudes> rk;
    const long total = static_cast<long>(config.n_steps) * config.substeps_per_sample;
    for (long k = 0; k < total; ++k)
        rk.step(apply, static_cast<double>(k) * dt, dt, psi);
    return psi;
}

// Step count that keeps |H| dt within `phase_per_step` for the given run.
inline long required_steps(const SparseOp& h, double t_final, double phase_per_step = kMaxPhasePerStep)
{
    const double bound = operator_norm_bound(h);
    return std::max(1L, static_cast<long>(std::ceil(bound * t_final / phase_per_step)));
}

} // namespace rydsqz
