#pragma once

// Run configuration: a flat `key = value` document with '#' comments.

#include "errors.hpp"
#include "feasibility.hpp"
#include "lasers.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace rydsqz
{

class ConfigError : public Error
{
public:
    ConfigError(const std::string& key, const std::string& what)
        : Error("config key '" + key + "': " + what), m_key(key)
    {
    }
    const std::string& key() const { return m_key; }

private:
    std::string m_key;
};

enum class Mode
{
    ideal,
    blockade,
    oracle,
    loss,
    feasibility,
    fig3
};

inline std::string to_string(Mode m)
{
    switch (m)
    {
    case Mode::ideal: return "ideal";
    case Mode::blockade: return "blockade";
    case Mode::oracle: return "oracle";
    case Mode::loss: return "loss";
    case Mode::feasibility: return "feasibility";
    case Mode::fig3: return "fig3";
    }
    return "?";
}

inline Mode parse_mode(const std::string& s)
{
    for (Mode m : {Mode::ideal, Mode::blockade, Mode::oracle, Mode::loss, Mode::feasibility, Mode::fig3})
        if (to_string(m) == s)
            return m;
    throw ConfigError("mode", "unknown mode '" + s + "'");
}

struct RunConfig
{
    Mode mode = Mode::fig3;
    int n_atoms = 20;
    double delta_mhz = 50.0;
    double delta_prime_mhz = 20.0;
    double omega0_mhz = 1.1;
    double omega1_mhz = 1.1;
    double omega2_mhz = 1.1;
    double omega_eff_mhz = 0.0; // required in ideal mode
    std::string phase_convention = "auto";
    bool mirror_triple = true;
    double t_final_us = 0.0; // 0: chosen from the coupling strength
    double dt_us = 0.0;      // 0: chosen from the step bound
    int n_steps = 200;       // recorded intervals in ideal mode
    double gamma_khz = 10.0;
    double s_target = 10.0;
    int n_lost = 0;
    double margin = 10.0;
    double density_cm3 = 2e11;
    double c3_calibration = kDefaultC3; // MHz um^3
    double strength_margin = kDefaultStrengthMargin;
    double u_int_mhz = std::numeric_limits<double>::infinity();
    std::string frequency_unit = "linear";
    std::string output_path = "";
    long long rng_seed = 0;

    bool operator==(const RunConfig&) const = default;

    FrequencyUnit unit() const
    {
        return frequency_unit == "angular" ? FrequencyUnit::angular_mhz : FrequencyUnit::linear_mhz;
    }
    double angular(double mhz) const { return to_angular(mhz, unit()); }

    std::string unit_note() const
    {
        return unit() == FrequencyUnit::linear_mhz ? "MHz values are linear frequencies; omega = 2 pi nu rad/us"
                                                   : "MHz values are angular frequencies in rad/us";
    }

    std::string output_stem() const { return output_path.empty() ? "rydsqz_" + to_string(mode) : output_path; }
};

namespace detail
{
inline double parse_double(const std::string& key, const std::string& v)
{
    if (v == "inf" || v == "+inf")
        return std::numeric_limits<double>::infinity();
    if (v == "-inf")
        return -std::numeric_limits<double>::infinity();
    try
    {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size())
            throw ConfigError(key, "not a number: '" + v + "'");
        return d;
    }
    catch (const std::logic_error&)
    {
        throw ConfigError(key, "not a number: '" + v + "'");
    }
}

inline long long parse_integer(const std::string& key, const std::string& v)
{
    long long out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end)
        throw ConfigError(key, "not an integer: '" + v + "'");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw ConfigError(key, "not a boolean: '" + v + "'");
}

inline std::string format_exact(double d)
{
    if (std::isinf(d))
        return d > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}
} // namespace detail

// Key order used by render().
inline const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys{
        "mode",          "n_atoms",       "delta_mhz",      "delta_prime_mhz", "omega0_mhz",      "omega1_mhz",
        "omega2_mhz",    "omega_eff_mhz", "phase_convention", "mirror_triple",  "t_final_us",      "dt_us",
        "n_steps",       "gamma_khz",     "s_target",       "n_lost",          "margin",          "density_cm3",
        "c3_calibration", "strength_margin", "u_int_mhz",   "frequency_unit",  "output_path",     "rng_seed"};
    return keys;
}

inline void set_value(RunConfig& c, const std::string& key, const std::string& value)
{
    using namespace detail;
    auto to_int = [&](const std::string& v) {
        const long long x = parse_integer(key, v);
        if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
            throw ConfigError(key, "out of range");
        return static_cast<int>(x);
    };
    if (key == "mode") c.mode = parse_mode(value);
    else if (key == "n_atoms") c.n_atoms = to_int(value);
    else if (key == "delta_mhz") c.delta_mhz = parse_double(key, value);
    else if (key == "delta_prime_mhz") c.delta_prime_mhz = parse_double(key, value);
    else if (key == "omega0_mhz") c.omega0_mhz = parse_double(key, value);
    else if (key == "omega1_mhz") c.omega1_mhz = parse_double(key, value);
    else if (key == "omega2_mhz") c.omega2_mhz = parse_double(key, value);
    else if (key == "omega_eff_mhz") c.omega_eff_mhz = parse_double(key, value);
    else if (key == "phase_convention") c.phase_convention = value;
    else if (key == "mirror_triple") c.mirror_triple = parse_bool(key, value);
    else if (key == "t_final_us") c.t_final_us = parse_double(key, value);
    else if (key == "dt_us") c.dt_us = parse_double(key, value);
    else if (key == "n_steps") c.n_steps = to_int(value);
    else if (key == "gamma_khz") c.gamma_khz = parse_double(key, value);
    else if (key == "s_target") c.s_target = parse_double(key, value);
    else if (key == "n_lost") c.n_lost = to_int(value);
    else if (key == "margin") c.margin = parse_double(key, value);
    else if (key == "density_cm3") c.density_cm3 = parse_double(key, value);
    else if (key == "c3_calibration") c.c3_calibration = parse_double(key, value);
    else if (key == "strength_margin") c.strength_margin = parse_double(key, value);
    else if (key == "u_int_mhz") c.u_int_mhz = parse_double(key, value);
    else if (key == "frequency_unit") c.frequency_unit = value;
    else if (key == "output_path") c.output_path = value;
    else if (key == "rng_seed") c.rng_seed = parse_integer(key, value);
    else throw ConfigError(key, "unknown key");
}

// Checks every invariant that can be decided without running an engine.
// `explicit_keys` holds the keys given by the user (for required keys).
inline void validate(const RunConfig& c, const std::set<std::string>& explicit_keys = {})
{
    auto positive = [](const char* key, double v) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError(key, "must be a finite positive number");
    };
    auto non_negative = [](const char* key, double v) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ConfigError(key, "must be a finite non-negative number");
    };
    if (c.n_atoms < 1)
        throw ConfigError("n_atoms", "must be >= 1");
    if (c.frequency_unit != "linear" && c.frequency_unit != "angular")
        throw ConfigError("frequency_unit", "must be 'linear' or 'angular'");
    if (c.phase_convention != "auto")
    {
        try
        {
            parse_phase_convention(c.phase_convention);
        }
        catch (const InvalidArgument& e)
        {
            throw ConfigError("phase_convention", e.what());
        }
    }
    non_negative("t_final_us", c.t_final_us);
    non_negative("dt_us", c.dt_us);
    if (c.n_steps < 1)
        throw ConfigError("n_steps", "must be >= 1");

    switch (c.mode)
    {
    case Mode::ideal:
        if (!explicit_keys.empty() && !explicit_keys.count("omega_eff_mhz"))
            throw ConfigError("omega_eff_mhz", "required in ideal mode");
        if (!std::isfinite(c.omega_eff_mhz) || c.omega_eff_mhz == 0.0)
            throw ConfigError("omega_eff_mhz", "must be finite and nonzero");
        break;
    case Mode::blockade:
    case Mode::fig3:
    case Mode::oracle:
        positive("delta_mhz", c.delta_mhz);
        positive("delta_prime_mhz", c.delta_prime_mhz);
        if (!(c.delta_mhz > c.delta_prime_mhz))
            throw ConfigError("delta_prime_mhz", "must be smaller than delta_mhz");
        non_negative("omega0_mhz", c.omega0_mhz);
        non_negative("omega1_mhz", c.omega1_mhz);
        non_negative("omega2_mhz", c.omega2_mhz);
        if (c.mode != Mode::oracle && c.n_atoms < 2)
            throw ConfigError("n_atoms", "must be >= 2 for squeezing runs");
        if (c.mode == Mode::oracle)
        {
            if (c.n_atoms > 6)
                throw ConfigError("n_atoms", "exact light shifts need n_atoms <= 6");
            if (c.omega0_mhz > 0.05 * c.delta_mhz)
                throw ConfigError("omega0_mhz", "light-shift oracle needs omega0 / delta <= 0.05");
            if (std::isnan(c.u_int_mhz))
                throw ConfigError("u_int_mhz", "must be a number or inf");
        }
        break;
    case Mode::loss:
        if (c.n_atoms < 2)
            throw ConfigError("n_atoms", "must be >= 2");
        if (c.n_lost < 0 || c.n_lost >= c.n_atoms)
            throw ConfigError("n_lost", "must satisfy 0 <= n_lost < n_atoms");
        if (!(c.s_target >= 1.0))
            throw ConfigError("s_target", "must be >= 1");
        break;
    case Mode::feasibility:
        positive("delta_mhz", c.delta_mhz);
        non_negative("delta_prime_mhz", c.delta_prime_mhz);
        if (c.delta_mhz == c.delta_prime_mhz)
            throw ConfigError("delta_prime_mhz", "must differ from delta_mhz");
        non_negative("omega0_mhz", c.omega0_mhz);
        non_negative("omega1_mhz", c.omega1_mhz);
        non_negative("omega2_mhz", c.omega2_mhz);
        if (!(c.s_target > 1.0))
            throw ConfigError("s_target", "must be > 1");
        positive("gamma_khz", c.gamma_khz);
        if (!(c.margin >= 1.0))
            throw ConfigError("margin", "must be >= 1");
        non_negative("density_cm3", c.density_cm3);
        positive("c3_calibration", c.c3_calibration);
        positive("strength_margin", c.strength_margin);
        break;
    }
}

struct ParsedConfig
{
    RunConfig config;
    std::set<std::string> explicit_keys;
};

// Applies the assignments of a document on top of `base`.
inline void apply_document(ParsedConfig& parsed, const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::set<std::string> seen;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.resize(hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (!seen.insert(key).second)
            throw ConfigError(key, "given twice");
        set_value(parsed.config, key, value);
        parsed.explicit_keys.insert(key);
    }
}

inline ParsedConfig parse_config_document(const std::string& text)
{
    ParsedConfig parsed;
    apply_document(parsed, text);
    validate(parsed.config, parsed.explicit_keys);
    return parsed;
}

inline RunConfig parse_config(const std::string& text) { return parse_config_document(text).config; }

inline std::string get_value(const RunConfig& c, const std::string& key)
{
    using detail::format_exact;
    if (key == "mode") return to_string(c.mode);
    if (key == "n_atoms") return std::to_string(c.n_atoms);
    if (key == "delta_mhz") return format_exact(c.delta_mhz);
    if (key == "delta_prime_mhz") return format_exact(c.delta_prime_mhz);
    if (key == "omega0_mhz") return format_exact(c.omega0_mhz);
    if (key == "omega1_mhz") return format_exact(c.omega1_mhz);
    if (key == "omega2_mhz") return format_exact(c.omega2_mhz);
    if (key == "omega_eff_mhz") return format_exact(c.omega_eff_mhz);
    if (key == "phase_convention") return c.phase_convention;
    if (key == "mirror_triple") return c.mirror_triple ? "true" : "false";
    if (key == "t_final_us") return format_exact(c.t_final_us);
    if (key == "dt_us") return format_exact(c.dt_us);
    if (key == "n_steps") return std::to_string(c.n_steps);
    if (key == "gamma_khz") return format_exact(c.gamma_khz);
    if (key == "s_target") return format_exact(c.s_target);
    if (key == "n_lost") return std::to_string(c.n_lost);
    if (key == "margin") return format_exact(c.margin);
    if (key == "density_cm3") return format_exact(c.density_cm3);
    if (key == "c3_calibration") return format_exact(c.c3_calibration);
    if (key == "strength_margin") return format_exact(c.strength_margin);
    if (key == "u_int_mhz") return format_exact(c.u_int_mhz);
    if (key == "frequency_unit") return c.frequency_unit;
    if (key == "output_path") return c.output_path;
    if (key == "rng_seed") return std::to_string(c.rng_seed);
    throw ConfigError(key, "unknown key");
}

inline std::string render(const RunConfig& c)
{
    std::ostringstream os;
    for (const auto& key : config_keys())
        os << key << " = " << get_value(c, key) << '\n';
    return os.str();
}

inline std::string read_text_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("--config", "cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Defaults, then the config file, then `key=value` overrides.
inline ParsedConfig resolve_config(std::optional<Mode> mode, const std::optional<std::string>& file_text,
                                   const std::vector<std::string>& overrides)
{
    ParsedConfig parsed;
    if (file_text)
        apply_document(parsed, *file_text);
    if (mode)
    {
        if (parsed.explicit_keys.count("mode") && parsed.config.mode != *mode)
            throw ConfigError("mode", "config file says '" + to_string(parsed.config.mode) +
                                          "' but the subcommand is '" + to_string(*mode) + "'");
        parsed.config.mode = *mode;
        parsed.explicit_keys.insert("mode");
    }
    for (const auto& o : overrides)
    {
        const auto eq = o.find('=');
        if (eq == std::string::npos)
            throw ConfigError(o, "override must be key=value");
        const std::string key = detail::trim(o.substr(0, eq));
        set_value(parsed.config, key, detail::trim(o.substr(eq + 1)));
        parsed.explicit_keys.insert(key);
    }
    validate(parsed.config, parsed.explicit_keys);
    return parsed;
}

} // namespace rydsqz
