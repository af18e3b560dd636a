#pragma once

// Ensemble driven by several lasers in the blockaded Dicke basis.
//
// The n_r = 2 manifold is removed entirely (infinite Rydberg-Rydberg shift).
// In the frame where |r> sits at the reference detuning, a laser of detuning
// d on the g<->r transition contributes
//     rabi * exp(i (d - d_ref) t) r^dag g + h.c.,
// with r^dag g the collective (Schwinger) ladder operator, so that a state
// |n_a, 0> couples to |n_a - 1, 1> with amplitude sqrt(n_a) * rabi.

#include "dicke.hpp"
#include "ideal_model.hpp"
#include "integrator.hpp"
#include "lasers.hpp"
#include "numerics.hpp"
#include "observables.hpp"
#include "trace.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

namespace rydsqz
{

class BlockadeHamiltonian
{
public:
    BlockadeHamiltonian(const DickeBasis& basis, const LaserSet& set)
        : m_basis(basis), m_set(set)
    {
        set.validate();
        m_diagonal = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.dimension()));
        for (std::size_t i = 0; i < basis.dimension(); ++i)
            m_diagonal[static_cast<Eigen::Index>(i)] = set.reference_detuning * basis.configuration(i).n_r;

        m_raise_a = ladder_action(basis, ladder::r_dag_a);
        m_lower_a = SparseOp(m_raise_a.adjoint());
        m_raise_b = ladder_action(basis, ladder::r_dag_b);
        m_lower_b = SparseOp(m_raise_b.adjoint());

        for (const auto& l : set.lasers)
        {
            Term term{l.detuning - set.reference_detuning, l.rabi};
            (l.transition == Transition::a_r ? m_terms_a : m_terms_b).push_back(term);
        }
        m_period = common_period(set.frame_frequencies());
        m_static = true;
        for (const auto& l : set.lasers)
            if (l.rabi != cplx(0.0) && l.detuning != set.reference_detuning)
                m_static = false;
        if (m_static)
            m_period.reset();
    }

    const DickeBasis& basis() const { return m_basis; }
    const LaserSet& lasers() const { return m_set; }
    std::size_t dimension() const { return m_basis.dimension(); }
    std::optional<double> period() const { return m_period; }
    bool is_static() const { return m_static; }

    cplx coefficient_a(double t) const { return coefficient(m_terms_a, t); }
    cplx coefficient_b(double t) const { return coefficient(m_terms_b, t); }

    template <class State>
    void apply(double t, const State& in, State& out) const
    {
        const cplx ca = coefficient_a(t);
        const cplx cb = coefficient_b(t);
        out = m_diagonal.asDiagonal() * in;
        if (ca != cplx(0.0))
        {
            out.noalias() += ca * (m_raise_a * in);
            out.noalias() += std::conj(ca) * (m_lower_a * in);
        }
        if (cb != cplx(0.0))
        {
            out.noalias() += cb * (m_raise_b * in);
            out.noalias() += std::conj(cb) * (m_lower_b * in);
        }
    }

    SparseOp at(double t) const
    {
        const cplx ca = coefficient_a(t);
        const cplx cb = coefficient_b(t);
        SparseOp h(static_cast<Eigen::Index>(dimension()), static_cast<Eigen::Index>(dimension()));
        std::vector<Eigen::Triplet<cplx>> diag;
        for (Eigen::Index i = 0; i < m_diagonal.size(); ++i)
            if (m_diagonal[i] != 0.0)
                diag.emplace_back(i, i, m_diagonal[i]);
        h.setFromTriplets(diag.begin(), diag.end());
        h += ca * m_raise_a + std::conj(ca) * m_lower_a;
        h += cb * m_raise_b + std::conj(cb) * m_lower_b;
        return h;
    }

    // Bound on |H(t)| valid for every t.
    double norm_bound() const
    {
        double sa = 0.0, sb = 0.0;
        for (const auto& term : m_terms_a)
            sa += std::abs(term.rabi);
        for (const auto& term : m_terms_b)
            sb += std::abs(term.rabi);
        return m_diagonal.cwiseAbs().maxCoeff() + sa * 2.0 * operator_norm_bound(m_raise_a) +
               sb * 2.0 * operator_norm_bound(m_raise_b);
    }

    // Largest phase accumulated per step of size dt, from either the
    // Hamiltonian norm or the fastest drive oscillation.
    double phase_per_step(double dt) const { return dt * std::max(norm_bound(), m_set.fastest_frequency()); }

private:
    struct Term
    {
        double frequency;
        cplx rabi;
    };

    static cplx coefficient(const std::vector<Term>& terms, double t)
    {
        cplx c(0.0);
        for (const auto& term : terms)
            c += term.rabi * std::polar(1.0, term.frequency * t);
        return c;
    }

    DickeBasis m_basis;
    LaserSet m_set;
    Eigen::VectorXd m_diagonal;
    SparseOp m_raise_a, m_lower_a, m_raise_b, m_lower_b;
    std::vector<Term> m_terms_a, m_terms_b;
    std::optional<double> m_period;
    bool m_static = false;
};

inline BlockadeHamiltonian build_time_dependent_hamiltonian(const DickeBasis& basis, const LaserSet& set)
{
    if (basis.max_rydberg() != 1)
        throw InvalidArgument("build_time_dependent_hamiltonian: basis must be truncated at n_r = 1");
    return BlockadeHamiltonian(basis, set);
}

struct BlockadeConfig
{
    int n_atoms = 20;
    LaserSet laser_set;
    double t_final = 1.0;
    double dt = 1e-3;
    int record_every = 1;
    // Reuse the RK4 map of one drive period when the drive is periodic and
    // the grid is aligned with it. Results equal plain stepping up to rounding.
    bool allow_period_map = true;
    // Also scan every step of one period after each `scan_every`-th record
    // for the peak <n_r>.
    bool scan_rydberg_peak = true;
    int scan_every = 1;

    void validate() const
    {
        if (n_atoms < 1)
            throw InvalidArgument("BlockadeConfig: n_atoms must be >= 1");
        if (!(t_final > 0.0))
            throw InvalidArgument("BlockadeConfig: t_final must be > 0");
        if (!(dt > 0.0))
            throw InvalidArgument("BlockadeConfig: dt must be > 0");
        if (record_every < 1)
            throw InvalidArgument("BlockadeConfig: record_every must be >= 1");
        if (scan_every < 1)
            throw InvalidArgument("BlockadeConfig: scan_every must be >= 1");
        laser_set.validate();
    }

    long total_steps() const { return std::max(1L, static_cast<long>(std::ceil(t_final / dt - 1e-9))); }
};

// <n_r> over one drive period starting at t.
struct RydbergScan
{
    double t = 0.0;
    double peak = 0.0;
    double average = 0.0;
};

struct BlockadeResult
{
    std::vector<RydbergScan> scans;
    SqueezingTrace trace;
    double max_nr_scanned = 0.0; // largest <n_r> seen at any integration step inspected
    double max_nr_period_average = 0.0; // largest <n_r> averaged over one scanned drive period
    double dt_used = 0.0;
    bool used_period_map = false;
};

inline std::string describe(const LaserSet& set)
{
    std::ostringstream os;
    os.precision(10);
    os << "ref=" << set.reference_detuning;
    for (const auto& l : set.lasers)
    {
        os << "; " << (l.transition == Transition::a_r ? "a-r" : "b-r") << " rabi=(" << l.rabi.real() << ","
           << l.rabi.imag() << ") det=" << l.detuning;
    }
    return os.str();
}

inline BlockadeResult evolve_blockade_detailed(const BlockadeConfig& config, const DickeState& initial)
{
    config.validate();
    const auto& basis = initial.basis();
    if (basis.n_atoms() != config.n_atoms)
        throw InvalidArgument("evolve_blockade: initial state has a different atom number");
    const auto h = build_time_dependent_hamiltonian(basis, config.laser_set);

    const long steps = config.total_steps();
    const double dt = config.t_final / static_cast<double>(steps);
    if (h.phase_per_step(dt) > kMaxPhasePerStep)
        throw StepSizeError("evolve_blockade: step too coarse (phase per step " +
                            std::to_string(h.phase_per_step(dt)) + " > 0.1 rad)");

    BlockadeResult result;
    result.dt_used = dt;
    auto& trace = result.trace;
    trace.n_atoms = config.n_atoms;
    trace.set_meta("model", "blockade");
    trace.set_meta("n_atoms", std::to_string(config.n_atoms));
    trace.set_meta("lasers", describe(config.laser_set));

    const SpinMeter meter(basis);
    const auto ground = static_cast<Eigen::Index>(basis.n_atoms() + 1);
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    auto rydberg_weight = [&](const Amplitudes& psi) { return psi.tail(dim - ground).squaredNorm(); };
    auto apply = [&h](double t, const Amplitudes& in, Amplitudes& out) { h.apply(t, in, out); };
    auto apply_dense = [&h](double t, const DenseOp& in, DenseOp& out) { h.apply(t, in, out); };

    Amplitudes psi = initial.amplitudes();
    trace.rows.push_back(make_row(0.0, meter.measure(psi), psi.norm()));
    result.max_nr_scanned = rydberg_weight(psi);

    // Period-map acceleration when the grid is commensurate with the drive.
    long per_period = 0;
    if (config.allow_period_map && h.period())
    {
        const double m = *h.period() / dt;
        if (std::abs(m - std::round(m)) < 1e-6 * m && std::lround(m) >= 1 &&
            config.record_every % std::lround(m) == 0)
            per_period = std::lround(m);
    }

    Rk4<Amplitudes> rk;
    auto check_norm = [&](const Amplitudes& v) {
        const double n2 = v.squaredNorm();
        if (std::abs(n2 - 1.0) > kHardNormTolerance)
            throw IntegrationFailure("evolve_blockade: norm drift exceeds 1e-6");
        return n2;
    };

    auto scan_period = [&](long first_step, const Amplitudes& start) {
        Amplitudes v = start;
        Rk4<Amplitudes> local;
        double sum = 0.0, peak = 0.0;
        for (long j = 0; j < per_period; ++j)
        {
            local.step(apply, static_cast<double>(first_step + j) * dt, dt, v);
            const double w = rydberg_weight(v);
            sum += w;
            peak = std::max(peak, w);
        }
        result.max_nr_scanned = std::max(result.max_nr_scanned, peak);
        const double average = sum / static_cast<double>(per_period);
        result.max_nr_period_average = std::max(result.max_nr_period_average, average);
        result.scans.push_back({static_cast<double>(first_step) * dt, peak, average});
    };

    long step = 0;
    if (per_period > 0)
    {
        result.used_period_map = true;
        const DenseOp one = rk4_step_map(apply_dense, basis.dimension(), 0.0, dt, per_period);
        const long q = config.record_every / per_period;
        DenseOp map = one;
        for (long k = 1; k < q; ++k)
            map = one * map;
        const double period_drift = std::abs((one.adjoint() * one - DenseOp::Identity(dim, dim)).norm());
        trace.max_step_norm_drift = period_drift / static_cast<double>(per_period);
        if (config.scan_rydberg_peak)
            scan_period(0, psi);
        long n_records = 0;
        while (step + config.record_every <= steps)
        {
            psi = map * psi;
            step += config.record_every;
            const double n2 = check_norm(psi);
            const double t = static_cast<double>(step) * dt;
            auto row = make_row(t, meter.measure(psi), std::sqrt(n2));
            trace.rows.push_back(row);
            result.max_nr_scanned = std::max(result.max_nr_scanned, row.nr_mean);
            ++n_records;
            if (config.scan_rydberg_peak && n_records % config.scan_every == 0 && step + per_period <= steps)
                scan_period(step, psi);
        }
    }

    double prev = psi.squaredNorm();
    long since_record = 0;
    while (step < steps)
    {
        rk.step(apply, static_cast<double>(step) * dt, dt, psi);
        ++step;
        ++since_record;
        const double n2 = psi.squaredNorm();
        trace.max_step_norm_drift = std::max(trace.max_step_norm_drift, std::abs(n2 - prev));
        prev = n2;
        result.max_nr_scanned = std::max(result.max_nr_scanned, rydberg_weight(psi));
        if (since_record == config.record_every || step == steps)
        {
            since_record = 0;
            check_norm(psi);
            trace.rows.push_back(make_row(static_cast<double>(step) * dt, meter.measure(psi), std::sqrt(n2)));
        }
    }
    return result;
}

inline SqueezingTrace evolve_blockade(const BlockadeConfig& config, const DickeState& initial)
{
    return evolve_blockade_detailed(config, initial).trace;
}

// Light shift of each |n_a, 0> under a single a<->r laser, from the phase
// accumulated by its survival amplitude.
struct LightShiftRun
{
    int n_atoms = 0;
    double omega = 0.0;
    double delta = 0.0;
    bool blockade = true;
    bool perturbative = true; // false when omega / delta > 0.1
    std::vector<double> shift;            // energy shift per n_a = 0..N
    std::vector<double> accumulated_phase; // phase at t_final per n_a
    Eigen::VectorXd polynomial;           // cubic fit of shift(n_a)

    double quadratic_coefficient() const { return polynomial.size() > 2 ? polynomial[2] : 0.0; }
    double linear_coefficient() const { return polynomial.size() > 1 ? polynomial[1] : 0.0; }
};

inline LightShiftRun single_laser_run(int n_atoms, double omega, double delta, bool blockade, double t_final,
                                      int n_samples = 4000)
{
    if (n_atoms < 1)
        throw InvalidArgument("single_laser_run: n_atoms must be >= 1");
    if (!(t_final > 0.0) || n_samples < 2 || delta == 0.0)
        throw InvalidArgument("single_laser_run: invalid grid or detuning");
    LightShiftRun run;
    run.n_atoms = n_atoms;
    run.omega = omega;
    run.delta = delta;
    run.blockade = blockade;
    run.perturbative = std::abs(omega / delta) <= 0.1;

    const DickeBasis basis(n_atoms, blockade ? 1 : 2);
    LaserSet set;
    set.lasers = {{Transition::a_r, omega, delta}};
    set.reference_detuning = delta;
    const BlockadeHamiltonian h(basis, set);
    const ExactPropagator prop(DenseOp(h.at(0.0)));

    std::vector<double> times;
    for (int k = 0; k <= n_samples; ++k)
        times.push_back(t_final * k / n_samples);

    std::vector<double> na_values;
    for (int na = 0; na <= n_atoms; ++na)
    {
        const auto idx = static_cast<Eigen::Index>(basis.index(na, 0));
        Amplitudes psi0 = Amplitudes::Zero(static_cast<Eigen::Index>(basis.dimension()));
        psi0[idx] = 1.0;
        std::vector<cplx> survival;
        survival.reserve(times.size());
        for (double t : times)
            survival.push_back(prop.apply(psi0, t)[idx]);
        const auto phases = unwrap_phases(survival);
        run.accumulated_phase.push_back(phases.back());
        run.shift.push_back(-linear_fit(times, phases).slope);
        na_values.push_back(na);
    }
    const int degree = std::min(3, n_atoms);
    run.polynomial = polyfit(na_values, run.shift, degree);
    return run;
}

// Quasi-energies of the ground-manifold Fock states |n_a, 0> under a laser
// set, measured over a window short compared with any Raman transfer.
inline std::vector<double> sector_light_shifts(const DickeBasis& basis, const LaserSet& set, double spacing,
                                               int n_samples, double max_dt)
{
    const BlockadeHamiltonian h(basis, set);
    const int n = basis.n_atoms();
    DenseOp initial = DenseOp::Zero(static_cast<Eigen::Index>(basis.dimension()), n + 1);
    for (int na = 0; na <= n; ++na)
        initial(static_cast<Eigen::Index>(basis.index(na, 0)), na) = 1.0;
    auto apply = [&h](double t, const DenseOp& in, DenseOp& out) { h.apply(t, in, out); };
    const auto run = sample_evolution(apply, initial, h.period(), max_dt, spacing, n_samples);
    std::vector<double> shifts;
    for (int na = 0; na <= n; ++na)
    {
        const auto idx = static_cast<Eigen::Index>(basis.index(na, 0));
        std::vector<cplx> survival;
        for (const auto& s : run.states)
            survival.push_back(s(idx, na));
        shifts.push_back(phase_slope_energy(run.times, survival));
    }
    return shifts;
}

} // namespace rydsqz
