#pragma once

#include "errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace rydsqz
{

struct TraceRow
{
    double t = 0.0;
    double s_factor = 1.0;
    double nb_mean = 0.0;
    double nr_mean = 0.0;
    double norm = 1.0;
    std::array<double, 3> mean_spin{};
    double theta_min = 0.0;
};

// Time series of the squeezing run plus an ordered metadata block.
struct SqueezingTrace
{
    std::vector<TraceRow> rows;
    std::vector<std::pair<std::string, std::string>> metadata;
    int n_atoms = 0;
    double max_step_norm_drift = 0.0;

    void set_meta(const std::string& key, const std::string& value)
    {
        for (auto& kv : metadata)
        {
            if (kv.first == key)
            {
                kv.second = value;
                return;
            }
        }
        metadata.emplace_back(key, value);
    }

    const std::string* meta(const std::string& key) const
    {
        for (const auto& kv : metadata)
            if (kv.first == key)
                return &kv.second;
        return nullptr;
    }

    const TraceRow& peak() const
    {
        if (rows.empty())
            throw InvalidArgument("SqueezingTrace: empty trace");
        return *std::max_element(rows.begin(), rows.end(), [](const TraceRow& x, const TraceRow& y) {
            return x.s_factor < y.s_factor;
        });
    }

    double max_nr() const
    {
        double m = 0.0;
        for (const auto& r : rows)
            m = std::max(m, r.nr_mean);
        return m;
    }

    // First time at which S reaches `target`, linearly interpolated; NaN if never.
    double time_to_reach(double target) const
    {
        for (std::size_t i = 0; i < rows.size(); ++i)
        {
            if (rows[i].s_factor >= target)
            {
                if (i == 0)
                    return rows[0].t;
                const auto& p = rows[i - 1];
                const auto& q = rows[i];
                const double w = (target - p.s_factor) / (q.s_factor - p.s_factor);
                return p.t + w * (q.t - p.t);
            }
        }
        return std::numeric_limits<double>::quiet_NaN();
    }

    // Linear interpolation of S at time t (t must lie within the grid).
    double s_at(double t) const
    {
        if (rows.empty() || t < rows.front().t || t > rows.back().t)
            throw InvalidArgument("SqueezingTrace: time outside trace grid");
        auto it = std::lower_bound(rows.begin(), rows.end(), t,
                                   [](const TraceRow& r, double value) { return r.t < value; });
        if (it == rows.begin())
            return it->s_factor;
        const auto& q = *it;
        const auto& p = *(it - 1);
        if (q.t == p.t)
            return q.s_factor;
        const double w = (t - p.t) / (q.t - p.t);
        return p.s_factor + w * (q.s_factor - p.s_factor);
    }
};

// 12 significant digits: enough for the trace, stable across platforms.
inline std::string format_double(double v)
{
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

inline void write_trace_csv(std::ostream& os, const SqueezingTrace& trace)
{
    for (const auto& [k, v] : trace.metadata)
        os << "# " << k << " = " << v << '\n';
    os << "t_us,S,nb_mean,nr_mean,norm\n";
    for (const auto& r : trace.rows)
    {
        os << format_double(r.t) << ',' << format_double(r.s_factor) << ','
           << format_double(r.nb_mean) << ',' << format_double(r.nr_mean) << ','
           << format_double(r.norm) << '\n';
    }
}

inline void write_trace_csv(const std::string& path, const SqueezingTrace& trace)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw Error("cannot open trace file for writing: " + path);
    write_trace_csv(os, trace);
}

inline SqueezingTrace read_trace_csv(std::istream& is)
{
    SqueezingTrace trace;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        if (line[0] == '#')
        {
            auto eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t");
                const auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            trace.metadata.emplace_back(trim(line.substr(1, eq - 1)), trim(line.substr(eq + 1)));
            continue;
        }
        if (!header_seen)
        {
            header_seen = true;
            continue;
        }
        std::istringstream fields(line);
        std::string cell;
        std::array<double, 5> v{};
        for (double& x : v)
        {
            if (!std::getline(fields, cell, ','))
                throw InvalidArgument("trace: malformed row '" + line + "'");
            x = std::stod(cell);
        }
        TraceRow row;
        row.t = v[0];
        row.s_factor = v[1];
        row.nb_mean = v[2];
        row.nr_mean = v[3];
        row.norm = v[4];
        trace.rows.push_back(row);
    }
    if (const auto* n = trace.meta("n_atoms"))
        trace.n_atoms = std::stoi(*n);
    return trace;
}

inline SqueezingTrace read_trace_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw InvalidArgument("cannot open trace file: " + path);
    return read_trace_csv(is);
}

struct DeviationReport
{
    double max_relative = 0.0;
    double mean_relative = 0.0;
    std::size_t n_points = 0;
    double window_begin = 0.0;
    double window_end = 0.0;
};

// Relative deviation |S_a - S_b| / S_b over the samples of `a` inside the
// window, with `b` linearly interpolated onto those times.
inline DeviationReport compare_traces(const SqueezingTrace& a, const SqueezingTrace& b,
                                      double window_begin = -std::numeric_limits<double>::infinity(),
                                      double window_end = std::numeric_limits<double>::infinity())
{
    if (a.rows.empty() || b.rows.empty())
        throw InvalidArgument("compare_traces: empty trace");
    if (a.n_atoms != 0 && b.n_atoms != 0 && a.n_atoms != b.n_atoms)
        throw InvalidArgument("compare_traces: traces describe different atom numbers");
    const double lo = std::max({window_begin, a.rows.front().t, b.rows.front().t});
    const double hi = std::min({window_end, a.rows.back().t, b.rows.back().t});
    if (lo > hi)
        throw InvalidArgument("compare_traces: time grids do not overlap in the window");

    DeviationReport rep;
    rep.window_begin = lo;
    rep.window_end = hi;
    double sum = 0.0;
    for (const auto& row : a.rows)
    {
        if (row.t < lo || row.t > hi)
            continue;
        const double ref = b.s_at(row.t);
        const double dev = std::abs(row.s_factor - ref) / std::abs(ref);
        rep.max_relative = std::max(rep.max_relative, dev);
        sum += dev;
        ++rep.n_points;
    }
    if (rep.n_points == 0)
        throw InvalidArgument("compare_traces: no samples inside the window");
    rep.mean_relative = sum / static_cast<double>(rep.n_points);
    return rep;
}

} // namespace rydsqz
