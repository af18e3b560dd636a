#pragma once

// Closed-form loss, timing and blockade-volume estimates.

#include "errors.hpp"

#include <cmath>
#include <string>

namespace rydsqz
{

inline constexpr double kFourThirdsPi = 4.0 / 3.0 * 3.14159265358979323846;

// Second moment of a transverse spin component after one atom of a
// permutation-symmetric N-atom state is lost.
inline double variance_after_single_loss(double variance, int n_atoms)
{
    if (n_atoms < 2)
        throw InvalidArgument("variance_after_single_loss: requires N >= 2");
    return variance * (1.0 - 2.0 / n_atoms) + 0.25;
}

struct LossModel
{
    int n_initial = 100;
    int n_lost = 0;
    double s_before = 1.0;

    void validate() const
    {
        if (n_initial < 1 || n_lost < 0 || n_lost >= n_initial)
            throw InvalidArgument("LossModel: requires 0 <= n_lost < n_initial");
        if (!(s_before >= 1.0))
            throw InvalidArgument("LossModel: s_before must be >= 1");
    }
};

// First-order closed form S / (1 + n_L S / N).
inline double squeezing_after_losses(const LossModel& m)
{
    m.validate();
    return m.s_before / (1.0 + m.n_lost * m.s_before / m.n_initial);
}

// Applies the single-loss map n_L times and converts back to a squeezing
// factor of the N - n_L remaining atoms.
inline double iterated_loss(const LossModel& m)
{
    m.validate();
    double var = (m.n_initial / 4.0) / m.s_before;
    for (int k = 0; k < m.n_lost; ++k)
        var = variance_after_single_loss(var, m.n_initial - k);
    return ((m.n_initial - m.n_lost) / 4.0) / var;
}

struct AdiabaticityMargins
{
    double pump = 0.0;    // sqrt(N) W0 m / D
    double stokes1 = 0.0; // sqrt(S/4) W1 m / (D + D')
    double stokes2 = 0.0; // sqrt(S/4) W2 m / (D - D')

    bool passes() const { return pump <= 1.0 && stokes1 <= 1.0 && stokes2 <= 1.0; }
};

inline AdiabaticityMargins adiabaticity_check(int n_atoms, double s_target, double omega0, double omega1,
                                              double omega2, double delta, double delta_prime, double margin)
{
    if (n_atoms < 1 || !(s_target > 0.0) || !(delta > 0.0))
        throw InvalidArgument("adiabaticity_check: requires N >= 1, S > 0, delta > 0");
    if (omega0 < 0.0 || omega1 < 0.0 || omega2 < 0.0)
        throw InvalidArgument("adiabaticity_check: Rabi frequencies must be non-negative");
    if (!(margin >= 1.0))
        throw InvalidArgument("adiabaticity_check: margin must be >= 1");
    if (delta == delta_prime || delta == -delta_prime)
        throw InvalidArgument("adiabaticity_check: delta = +-delta_prime");
    const double ss = std::sqrt(s_target / 4.0);
    return {std::sqrt(static_cast<double>(n_atoms)) * omega0 * margin / delta,
            ss * omega1 * margin / std::abs(delta + delta_prime), ss * omega2 * margin / std::abs(delta - delta_prime)};
}

// Time to build up squeezing S, in the unit reciprocal to delta.
inline double squeezing_time(double s, double delta)
{
    if (!(s > 1.0))
        throw InvalidArgument("squeezing_time: requires S > 1");
    if (!(delta > 0.0))
        throw InvalidArgument("squeezing_time: requires delta > 0");
    return 1e4 / 16.0 * s * std::log(s) / delta;
}

// Detuning threshold set by a loss rate gamma (same unit as gamma).
inline double min_detuning(double s, double gamma)
{
    if (!(s >= 1.0) || !(gamma > 0.0))
        throw InvalidArgument("min_detuning: requires S >= 1 and gamma > 0");
    return gamma * 1e2 * s * std::log(s) / 4.0;
}

struct BlockadeVolume
{
    double radius = 0.0;    // d0, length unit of c3
    double neighbors = 0.0; // atoms inside the blockade sphere
};

// Default interaction strength margin: U(d0) = margin * delta.
inline constexpr double kDefaultStrengthMargin = 10.0;

// c3 (MHz um^3) that puts the blockade radius at `radius_um` for `delta_mhz`.
inline double calibrate_c3(double radius_um, double delta_mhz, double strength_margin = kDefaultStrengthMargin)
{
    if (!(radius_um > 0.0) || !(delta_mhz > 0.0) || !(strength_margin > 0.0))
        throw InvalidArgument("calibrate_c3: positive inputs required");
    return strength_margin * delta_mhz * radius_um * radius_um * radius_um;
}

// 3 um at 50 MHz.
inline const double kDefaultC3 = calibrate_c3(3.0, 50.0);

inline BlockadeVolume blockade_neighbors(double c3, double delta, double strength_margin, double density)
{
    if (!(c3 > 0.0) || !(delta > 0.0) || !(strength_margin > 0.0) || density < 0.0)
        throw InvalidArgument("blockade_neighbors: positive inputs required");
    BlockadeVolume v;
    v.radius = std::cbrt(c3 / (strength_margin * delta));
    v.neighbors = density * kFourThirdsPi * v.radius * v.radius * v.radius;
    return v;
}

// atoms / cm^3 -> atoms / um^3
inline double per_cm3_to_per_um3(double density_cm3) { return density_cm3 * 1e-12; }

struct FeasibilityInputs
{
    int n_atoms = 20;
    double s_target = 10.0;
    double omega0 = 1.1; // MHz
    double omega1 = 1.1;
    double omega2 = 1.1;
    double delta = 50.0;
    double delta_prime = 20.0;
    double margin = 10.0;
    double gamma = 0.01; // MHz
    double c3 = kDefaultC3;
    double strength_margin = kDefaultStrengthMargin;
    double density_cm3 = 2e11;
};

struct FeasibilityReport
{
    AdiabaticityMargins adiabaticity;
    double squeezing_time = 0.0;
    double min_detuning = 0.0;
    bool detuning_above_threshold = false; // delta > threshold at face value
    BlockadeVolume blockade;

    bool any_violation() const { return !adiabaticity.passes() || !detuning_above_threshold; }
};

inline FeasibilityReport feasibility_report(const FeasibilityInputs& in)
{
    FeasibilityReport r;
    r.adiabaticity = adiabaticity_check(in.n_atoms, in.s_target, in.omega0, in.omega1, in.omega2, in.delta,
                                        in.delta_prime, in.margin);
    r.squeezing_time = squeezing_time(in.s_target, in.delta);
    r.min_detuning = min_detuning(in.s_target, in.gamma);
    r.detuning_above_threshold = in.delta > r.min_detuning;
    r.blockade = blockade_neighbors(in.c3, in.delta, in.strength_margin, per_cm3_to_per_um3(in.density_cm3));
    return r;
}

} // namespace rydsqz
