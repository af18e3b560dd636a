#pragma once

// Mode dispatch for the command-line driver. Each run writes its traces and
// a `key = value` summary next to `output_path`.

#include "config.hpp"
#include "feasibility.hpp"
#include "ideal_model.hpp"
#include "perturbation_oracle.hpp"
#include "squeezing_experiment.hpp"
#include "trace.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace rydsqz
{

inline constexpr const char* kEngineVersion = "rydsqz 0.1.0";

struct Summary
{
    std::vector<std::pair<std::string, std::string>> entries;

    void add(const std::string& key, const std::string& value) { entries.emplace_back(key, value); }
    void add(const std::string& key, double value) { add(key, format_double(value)); }
    void add(const std::string& key, bool value) { add(key, std::string(value ? "pass" : "fail")); }
    void add(const std::string& key, int value) { add(key, std::to_string(value)); }

    std::string get(const std::string& key) const
    {
        for (const auto& [k, v] : entries)
            if (k == key)
                return v;
        return "";
    }

    void write(std::ostream& os) const
    {
        for (const auto& [k, v] : entries)
            os << k << " = " << v << '\n';
    }
};

struct RunOutcome
{
    Summary summary;
    std::vector<std::string> files;
};

namespace detail
{
inline void stamp(SqueezingTrace& trace, const RunConfig& c)
{
    trace.set_meta("engine", kEngineVersion);
    trace.set_meta("unit_note", c.unit_note());
    for (const auto& key : config_keys())
        trace.set_meta("config." + key, get_value(c, key));
}

inline std::string write_trace(const SqueezingTrace& trace, const std::string& path)
{
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty())
        std::filesystem::create_directories(parent);
    write_trace_csv(path, trace);
    return path;
}

inline DriveParameters drive_from(const RunConfig& c)
{
    return {c.angular(c.delta_mhz), c.angular(c.delta_prime_mhz), c.angular(c.omega0_mhz), c.angular(c.omega1_mhz),
            c.angular(c.omega2_mhz)};
}

// Largest t such that the trace's n_b stays below `limit` up to t.
inline double early_window_end(const SqueezingTrace& t, double limit)
{
    double end = t.rows.front().t;
    for (const auto& r : t.rows)
    {
        if (r.nb_mean >= limit)
            break;
        end = r.t;
    }
    return end;
}

inline void run_ideal(const RunConfig& c, RunOutcome& out)
{
    IdealConfig ic;
    ic.n_atoms = c.n_atoms;
    ic.omega_eff = c.angular(c.omega_eff_mhz);
    ic.n_steps = c.n_steps;
    ic.t_final = c.t_final_us > 0.0
                     ? c.t_final_us
                     : 2.0 * std::log(std::max(2.0, c.n_atoms / 2.0)) / (4.0 * c.n_atoms * std::abs(ic.omega_eff));
    const DickeBasis basis = build_basis(c.n_atoms, 0);
    const SparseOp h = build_ideal_hamiltonian(basis, ic.omega_eff);
    long total = required_steps(h, ic.t_final);
    if (c.dt_us > 0.0)
        total = std::max(total, static_cast<long>(std::ceil(ic.t_final / c.dt_us)));
    ic.substeps_per_sample = static_cast<int>((total + ic.n_steps - 1) / ic.n_steps);
    auto trace = evolve_ideal(ic, DickeState::all_in_a(basis));
    stamp(trace, c);
    out.files.push_back(write_trace(trace, c.output_stem() + ".csv"));

    const auto prediction = analytic_curves(ic);
    double worst_s = 0.0, worst_nb = 0.0;
    for (const auto& r : trace.rows)
    {
        if (r.nb_mean >= 0.05 * c.n_atoms)
            break;
        worst_s = std::max(worst_s, std::abs(r.s_factor / prediction.s_analytic(r.t) - 1.0));
        if (r.t > 0.0)
            worst_nb = std::max(worst_nb, std::abs(r.nb_mean / prediction.nb_analytic(r.t) - 1.0));
    }
    const auto& peak = trace.peak();
    out.summary.add("s_max", peak.s_factor);
    out.summary.add("t_s_max_us", peak.t);
    out.summary.add("analytic_window_max_dev_s", worst_s);
    out.summary.add("analytic_window_max_dev_nb", worst_nb);
    out.summary.add("analytic_window_check", worst_s <= 0.05 && worst_nb <= 0.05);
    out.summary.add("max_step_norm_drift", trace.max_step_norm_drift);
    out.summary.add("norm_check", trace.max_step_norm_drift < 1e-9);
}

inline void run_laser(const RunConfig& c, RunOutcome& out, bool with_reference)
{
    LaserRunConfig rc;
    rc.n_atoms = c.n_atoms;
    rc.drive = drive_from(c);
    rc.mirror_triple = with_reference ? true : c.mirror_triple;
    if (c.phase_convention != "auto")
        rc.convention = parse_phase_convention(c.phase_convention);
    rc.t_final = c.t_final_us;
    rc.dt = c.dt_us;
    const LaserRun run = run_laser_squeezing(rc);

    SqueezingTrace trace = run.blockade.trace;
    stamp(trace, c);
    if (run.mirror_triple)
        trace.set_meta("phase_convention", run.convention.name());
    out.files.push_back(write_trace(trace, c.output_stem() + (with_reference ? "_six_laser.csv" : ".csv")));

    const auto& peak = trace.peak();
    out.summary.add("lasers", std::string(run.mirror_triple ? "six" : "three"));
    if (run.mirror_triple)
        out.summary.add("phase_convention", run.convention.name());
    if (run.choice)
    {
        for (const auto& s : run.choice->scores)
            out.summary.add("convention_score." + s.convention.name(),
                            format_double(s.early_squeezing) + (s.audited_ok ? " audited" : " rejected"));
    }
    out.summary.add("pair_coupling_re", run.pair.omega_c.real());
    out.summary.add("pair_coupling_im", run.pair.omega_c.imag());
    out.summary.add("omega_eff", run.omega_eff);
    out.summary.add("s_max", peak.s_factor);
    out.summary.add("t_s_max_us", peak.t);
    out.summary.add("nr_max_sampled", [&] {
        double m = 0.0;
        for (const auto& r : trace.rows)
            m = std::max(m, r.nr_mean);
        return m;
    }());
    out.summary.add("nr_max_instantaneous", run.blockade.max_nr_scanned);
    out.summary.add("nr_max_period_average", run.blockade.max_nr_period_average);
    out.summary.add("dt_us", run.blockade.dt_used);

    if (with_reference)
    {
        SqueezingTrace ref = run.reference;
        stamp(ref, c);
        ref.set_meta("omega_eff", format_double(run.omega_eff));
        out.files.push_back(write_trace(ref, c.output_stem() + "_reference.csv"));
        const double end = early_window_end(ref, 0.05 * c.n_atoms);
        const auto dev = compare_traces(trace, ref, 0.0, end);
        out.summary.add("reference_s_max", ref.peak().s_factor);
        out.summary.add("early_window_end_us", end);
        out.summary.add("early_window_max_rel_dev", dev.max_relative);
        out.summary.add("early_window_mean_rel_dev", dev.mean_relative);
        out.summary.add("s_max_check", peak.s_factor >= 0.5 * c.n_atoms);
        out.summary.add("early_window_check", dev.max_relative <= 0.3);
    }
}

inline void run_oracle(const RunConfig& c, RunOutcome& out)
{
    const double delta = c.angular(c.delta_mhz);
    const double dp = c.angular(c.delta_prime_mhz);
    const double w0 = c.angular(c.omega0_mhz), w1 = c.angular(c.omega1_mhz), w2 = c.angular(c.omega2_mhz);
    const double u = std::isinf(c.u_int_mhz) ? c.u_int_mhz : c.angular(c.u_int_mhz);

    const auto exact = light_shift_exact(c.n_atoms, w0, delta, u);
    const auto sums = fourth_order_sum(c.n_atoms, w0, delta, u);
    const std::string path = c.output_stem() + "_light_shift.csv";
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty())
        std::filesystem::create_directories(parent);
    std::ofstream os(path);
    os << "# engine = " << kEngineVersion << '\n';
    os << "# unit_note = " << c.unit_note() << '\n';
    for (const auto& key : config_keys())
        os << "# config." << key << " = " << get_value(c, key) << '\n';
    os << "n_a,exact,fourth_order_sum,free_closed_form,blockaded_closed_form\n";
    std::vector<double> x, y;
    for (int na = 0; na <= c.n_atoms; ++na)
    {
        os << na << ',' << format_double(exact[na]) << ',' << format_double(sums[na].total()) << ','
           << format_double(light_shift_free(na, w0, delta)) << ','
           << format_double(light_shift_blockaded(na, w0, delta)) << '\n';
        x.push_back(na);
        y.push_back(exact[na]);
    }
    out.files.push_back(path);
    if (c.n_atoms >= 2)
    {
        const auto poly = polyfit(x, y, std::min(3, c.n_atoms));
        out.summary.add("light_shift_quadratic", poly[2]);
        out.summary.add("light_shift_quadratic_over_w4_d3", poly[2] * delta * delta * delta / std::pow(w0, 4));
    }

    PairCouplingOptions options;
    const auto pair = two_atom_spectroscopy(TwoAtomModel{standard_three_laser_set(delta, dp, w0, w1, w2), u}, options);
    const double closed = four_photon_coupling(delta, dp, w0, w1, w2);
    out.summary.add("pair_coupling_re", pair.omega_c.real());
    out.summary.add("pair_coupling_im", pair.omega_c.imag());
    out.summary.add("pair_coupling_closed_form", closed);
    out.summary.add("pair_coupling_ratio", pair.omega_c.real() / closed);
    out.summary.add("pair_fit_reliable", pair.reliable);

    const auto audit = phase_convention_audit(delta, dp, w0, w1, w2, u, options);
    auto audit_line = [](const AuditEntry& e) {
        std::ostringstream os;
        os << "shift_a=" << format_double(e.single.shift_a) << " shift_b=" << format_double(e.single.shift_b)
           << " nonlinear=" << format_double(e.nonlinear_shift) << " coupling=" << format_double(e.omega_c.real())
           << (e.mirror_present ? (e.satisfies() ? " ok" : " rejected") : "");
        return os.str();
    };
    out.summary.add("audit.three_laser", audit_line(audit.three_laser));
    for (const auto& e : audit.entries)
        out.summary.add("audit." + e.convention.name(), audit_line(e));
}

inline void run_loss(const RunConfig& c, RunOutcome& out)
{
    const LossModel m{c.n_atoms, c.n_lost, c.s_target};
    out.summary.add("s_before", c.s_target);
    out.summary.add("s_after_closed_form", squeezing_after_losses(m));
    out.summary.add("s_after_iterated", iterated_loss(m));
    out.summary.add("loss_parameter", c.n_lost * c.s_target / c.n_atoms);
}

inline void run_feasibility(const RunConfig& c, RunOutcome& out)
{
    FeasibilityInputs in;
    in.n_atoms = c.n_atoms;
    in.s_target = c.s_target;
    in.omega0 = c.angular(c.omega0_mhz);
    in.omega1 = c.angular(c.omega1_mhz);
    in.omega2 = c.angular(c.omega2_mhz);
    in.delta = c.angular(c.delta_mhz);
    in.delta_prime = c.angular(c.delta_prime_mhz);
    in.margin = c.margin;
    in.gamma = c.gamma_khz * 1e-3; // MHz, same convention as the threshold
    in.c3 = c.c3_calibration;
    in.strength_margin = c.strength_margin;
    in.density_cm3 = c.density_cm3;
    const auto r = feasibility_report(in);
    // Closed forms taking MHz at face value.
    const double threshold_mhz = min_detuning(c.s_target, c.gamma_khz * 1e-3);
    const auto volume =
        blockade_neighbors(c.c3_calibration, c.delta_mhz, c.strength_margin, per_cm3_to_per_um3(c.density_cm3));
    out.summary.add("adiabaticity_pump", r.adiabaticity.pump);
    out.summary.add("adiabaticity_stokes1", r.adiabaticity.stokes1);
    out.summary.add("adiabaticity_stokes2", r.adiabaticity.stokes2);
    out.summary.add("adiabaticity_check", r.adiabaticity.passes());
    out.summary.add("squeezing_time_us", r.squeezing_time);
    out.summary.add("min_detuning_mhz", threshold_mhz);
    out.summary.add("detuning_check", c.delta_mhz > threshold_mhz);
    out.summary.add("blockade_radius_um", volume.radius);
    out.summary.add("blockade_neighbors", volume.neighbors);
}
} // namespace detail

inline RunOutcome run(const RunConfig& c)
{
    validate(c);
    const auto start = std::chrono::steady_clock::now();
    RunOutcome out;
    out.summary.add("mode", to_string(c.mode));
    out.summary.add("engine", std::string(kEngineVersion));
    out.summary.add("unit_note", c.unit_note());
    switch (c.mode)
    {
    case Mode::ideal: detail::run_ideal(c, out); break;
    case Mode::blockade: detail::run_laser(c, out, false); break;
    case Mode::fig3: detail::run_laser(c, out, true); break;
    case Mode::oracle: detail::run_oracle(c, out); break;
    case Mode::loss: detail::run_loss(c, out); break;
    case Mode::feasibility: detail::run_feasibility(c, out); break;
    }
    for (const auto& key : config_keys())
        out.summary.add("config." + key, get_value(c, key));
    out.summary.add("rng_seed", std::to_string(c.rng_seed));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.summary.add("wall_time_s", wall);

    const std::string path = c.output_stem() + "_summary.txt";
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty())
        std::filesystem::create_directories(parent);
    std::ofstream os(path);
    if (!os)
        throw InvalidArgument("cannot write '" + path + "'");
    out.summary.write(os);
    out.files.push_back(path);
    return out;
}

} // namespace rydsqz
