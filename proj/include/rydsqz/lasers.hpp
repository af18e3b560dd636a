#pragma once

// Monochromatic drives of the a<->r and b<->r transitions.
//
// Frequencies are angular and times are in the reciprocal unit. A laser with
// detuning d contributes rabi * exp(i d t) |r><g| + h.c. in the frame of the
// bare atomic energies, so d > 0 means the laser sits below the Rydberg level.

#include "errors.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rydsqz
{

enum class Transition
{
    a_r,
    b_r
};

struct Laser
{
    Transition transition = Transition::a_r;
    std::complex<double> rabi{0.0, 0.0};
    double detuning = 0.0;
};

struct LaserSet
{
    std::vector<Laser> lasers;
    double reference_detuning = 0.0; // rotating-frame energy of |r>

    void validate() const
    {
        if (lasers.empty())
            throw InvalidArgument("LaserSet: at least one laser required");
        for (const auto& l : lasers)
        {
            if (!std::isfinite(l.detuning) || !std::isfinite(l.rabi.real()) || !std::isfinite(l.rabi.imag()))
                throw InvalidArgument("LaserSet: non-finite laser parameter");
        }
        if (!std::isfinite(reference_detuning))
            throw InvalidArgument("LaserSet: non-finite reference detuning");
    }

    bool has_pump() const
    {
        for (const auto& l : lasers)
            if (l.transition == Transition::a_r && std::abs(l.rabi) > 0.0)
                return true;
        return false;
    }

    // Oscillation frequencies of the drive terms in the rotating frame.
    std::vector<double> frame_frequencies() const
    {
        std::vector<double> f;
        f.reserve(lasers.size());
        for (const auto& l : lasers)
            f.push_back(l.detuning - reference_detuning);
        return f;
    }

    // Largest angular frequency that must be resolved by a time step.
    double fastest_frequency() const
    {
        double m = std::abs(reference_detuning);
        for (const auto& l : lasers)
            m = std::max(m, std::abs(l.detuning - reference_detuning));
        return m;
    }

    LaserSet with_reference(double reference) const
    {
        LaserSet copy = *this;
        copy.reference_detuning = reference;
        return copy;
    }
};

// Phases (degrees) applied to the two mirror Stokes lasers relative to the
// original ones. The pump of the mirror triple is never dephased.
struct PhaseConvention
{
    double stokes1_deg = 90.0;
    double stokes2_deg = -90.0;

    bool operator==(const PhaseConvention&) const = default;

    std::string name() const
    {
        auto tag = [](double d) {
            if (d == 0.0)
                return std::string("0");
            return std::string(d > 0 ? "+" : "-") + std::to_string(static_cast<int>(std::lround(std::abs(d))));
        };
        return tag(stokes1_deg) + "/" + tag(stokes2_deg);
    }
};

namespace phase_conventions
{
inline constexpr PhaseConvention plus_minus{90.0, -90.0};
inline constexpr PhaseConvention minus_plus{-90.0, 90.0};
inline constexpr PhaseConvention plus_plus{90.0, 90.0};
inline constexpr PhaseConvention minus_minus{-90.0, -90.0};
inline constexpr PhaseConvention zero_zero{0.0, 0.0};

// The four sign assignments of the +-90 degree dephasing.
inline constexpr std::array<PhaseConvention, 4> all{plus_minus, minus_plus, plus_plus, minus_minus};
} // namespace phase_conventions

inline PhaseConvention parse_phase_convention(const std::string& text)
{
    for (const auto& c : phase_conventions::all)
        if (c.name() == text)
            return c;
    if (text == phase_conventions::zero_zero.name())
        return phase_conventions::zero_zero;
    throw InvalidArgument("unknown phase convention '" + text + "' (expected +90/-90, -90/+90, +90/+90, -90/-90 or 0/0)");
}

namespace detail
{
inline void check_detunings(double delta, double delta_prime)
{
    if (!(delta > delta_prime) || !(delta_prime > 0.0))
        throw InvalidArgument("laser set: requires delta > delta_prime > 0");
}
} // namespace detail

// Pump on a<->r at `delta`, Stokes lasers on b<->r at delta -+ delta_prime.
inline LaserSet standard_three_laser_set(double delta, double delta_prime, std::complex<double> omega0,
                                         std::complex<double> omega1, std::complex<double> omega2)
{
    detail::check_detunings(delta, delta_prime);
    LaserSet set;
    set.lasers = {
        {Transition::a_r, omega0, delta},
        {Transition::b_r, omega1, delta - delta_prime},
        {Transition::b_r, omega2, delta + delta_prime},
    };
    set.reference_detuning = delta;
    return set;
}

// Three-laser set plus its mirror image at opposite detunings with the mirror
// Stokes lasers dephased according to `convention`.
inline LaserSet standard_six_laser_set(double delta, double delta_prime, std::complex<double> omega0,
                                       std::complex<double> omega1, std::complex<double> omega2,
                                       PhaseConvention convention = phase_conventions::plus_minus)
{
    LaserSet set = standard_three_laser_set(delta, delta_prime, omega0, omega1, omega2);
    constexpr double deg = 3.14159265358979323846 / 180.0;
    const auto phase1 = std::polar(1.0, convention.stokes1_deg * deg);
    const auto phase2 = std::polar(1.0, convention.stokes2_deg * deg);
    set.lasers.push_back({Transition::a_r, omega0, -delta});
    set.lasers.push_back({Transition::b_r, omega1 * phase1, -(delta - delta_prime)});
    set.lasers.push_back({Transition::b_r, omega2 * phase2, -(delta + delta_prime)});
    return set;
}

// Four-photon |aa> <-> |bb> coupling of the three-laser scheme in the limit
// of a large Rydberg-Rydberg shift:
//   -4 W0^2 W1 W2 / (D (D - D') (D + D')).
inline double four_photon_coupling(double delta, double delta_prime, double omega0, double omega1, double omega2)
{
    return -4.0 * omega0 * omega0 * omega1 * omega2 /
           (delta * (delta - delta_prime) * (delta + delta_prime));
}

// Period T such that every frequency is an integer multiple of 2 pi / T.
inline std::optional<double> common_period(std::span<const double> frequencies, int max_harmonic = 4000,
                                           double rel_tol = 1e-9)
{
    double smallest = 0.0;
    for (double f : frequencies)
    {
        const double a = std::abs(f);
        if (a > 0.0 && (smallest == 0.0 || a < smallest))
            smallest = a;
    }
    if (smallest == 0.0)
        return std::nullopt; // static Hamiltonian
    for (int k = 1; k <= max_harmonic; ++k)
    {
        const double base = smallest / k;
        bool ok = true;
        for (double f : frequencies)
        {
            const double ratio = f / base;
            if (std::abs(ratio - std::round(ratio)) > rel_tol * std::max(1.0, std::abs(ratio)))
            {
                ok = false;
                break;
            }
        }
        if (ok)
            return 2.0 * 3.14159265358979323846 / base;
    }
    return std::nullopt;
}

// Frequencies quoted in MHz are linear by default (nu -> 2 pi nu rad/us).
enum class FrequencyUnit
{
    linear_mhz,
    angular_mhz
};

inline double to_angular(double mhz, FrequencyUnit unit)
{
    return unit == FrequencyUnit::linear_mhz ? 2.0 * 3.14159265358979323846 * mhz : mhz;
}

} // namespace rydsqz
